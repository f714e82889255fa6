#include "sasd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/prox.hpp"

namespace sasd {

namespace {

void require_index(const Problem& problem, std::size_t k) {
  if (k >= problem.num_kernels) {
    throw DomainError("atom index " + std::to_string(k) + " out of range (N = " +
                      std::to_string(problem.num_kernels) + ")");
  }
}

// Linear (zero-padded) correlation of u against v at lag ℓ: Σ_i u_i v_{i+ℓ}.
double lagged_dot(std::span<const double> u, std::span<const double> v, long lag) {
  double s = 0.0;
  for (long i = 0; i < static_cast<long>(u.size()); ++i) {
    const long j = i + lag;
    if (j >= 0 && j < static_cast<long>(v.size())) s += u[i] * v[j];
  }
  return s;
}

}  // namespace

void Problem::validate() const {
  if (signal.size() == 0 || y.size() != signal.size()) {
    throw DimensionError("problem: observation has " + std::to_string(y.size()) +
                         " samples, signal shape holds " + std::to_string(signal.size()));
  }
  if (kernel.size() == 0 || !kernel.fits_in(signal)) {
    throw DimensionError("problem: kernel shape does not fit in the signal");
  }
  if (num_kernels < 1) throw DimensionError("problem: need at least one kernel");
}

Problem make_problem(Vec y, std::size_t kernel_length, std::size_t num_kernels, bool fit_bias) {
  Problem p;
  p.signal = Extent{y.size()};
  p.kernel = Extent{kernel_length};
  p.y = std::move(y);
  p.num_kernels = num_kernels;
  p.fit_bias = fit_bias;
  p.validate();
  return p;
}

void PenaltyConfig::validate(const Problem& problem) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("penalty: lambda must be >= 0");
  if (weights.empty()) return;
  if (weights.size() != problem.num_kernels) {
    throw DimensionError("penalty: expected one weight vector per map");
  }
  for (const auto& w : weights) {
    if (w.size() != problem.signal.size()) throw DimensionError("penalty: weight length mismatch");
    for (double v : w) {
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("penalty: weights must be positive");
    }
  }
}

void validate_state(const Problem& problem, const BilinearState& state) {
  if (state.kernels.size() != problem.num_kernels || state.maps.size() != problem.num_kernels) {
    throw DimensionError("state: expected " + std::to_string(problem.num_kernels) +
                         " kernel/map pairs");
  }
  for (std::size_t k = 0; k < problem.num_kernels; ++k) {
    if (state.kernels[k].size() != problem.kernel.size()) {
      throw DimensionError("state: kernel " + std::to_string(k) + " has wrong length");
    }
    if (state.maps[k].size() != problem.signal.size()) {
      throw DimensionError("state: map " + std::to_string(k) + " has wrong length");
    }
  }
}

Vec residual(const Problem& problem, const BilinearState& state) {
  validate_state(problem, state);
  Vec r(problem.signal.size(), state.bias);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= problem.y[i];
  for (std::size_t k = 0; k < problem.num_kernels; ++k) {
    const Vec c = cconv(problem.signal, state.maps[k], problem.kernel, state.kernels[k]);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c[i];
  }
  return r;
}

double psi_value(const Problem& problem, const BilinearState& state) {
  const Vec r = residual(problem, state);
  return 0.5 * dot(r, r);
}

double penalty_value(const BilinearState& state, const PenaltyConfig& penalty) {
  double s = 0.0;
  for (std::size_t k = 0; k < state.maps.size(); ++k) {
    const auto& x = state.maps[k];
    if (penalty.weights.empty()) {
      s += norm1(x);
    } else {
      const auto& w = penalty.weights[k];
      for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::abs(x[i]);
    }
  }
  return penalty.lambda * s;
}

double obj_value(const Problem& problem, const BilinearState& state, const PenaltyConfig& penalty) {
  return psi_value(problem, state) + penalty_value(state, penalty);
}

Vec grad_x(const Problem& problem, const BilinearState& state, std::size_t k) {
  require_index(problem, k);
  const Vec r = residual(problem, state);
  return ccorr(problem.kernel, state.kernels[k], problem.signal, r);
}

Vec egrad_a(const Problem& problem, const BilinearState& state, std::size_t k) {
  require_index(problem, k);
  const Vec r = residual(problem, state);
  const Vec full = ccorr(problem.signal, state.maps[k], problem.signal, r);
  return restrict_to(problem.signal, full, problem.kernel);
}

Vec rgrad_a(const Problem& problem, const BilinearState& state, std::size_t k) {
  return tangent_project(state.kernels[k], egrad_a(problem, state, k));
}

double shift_coherence(std::span<const double> a0, ShiftMode mode) {
  const double energy = dot(a0, a0);
  if (!(energy > 0.0)) throw DomainError("shift_coherence: zero kernel");
  const long n0 = static_cast<long>(a0.size());
  double best = 0.0;
  for (long lag = 1; lag < n0; ++lag) {
    double c;
    if (mode == ShiftMode::kLinear) {
      // Linear autocorrelation is symmetric in the lag sign.
      c = lagged_dot(a0, a0, lag);
    } else {
      c = 0.0;
      for (long i = 0; i < n0; ++i) c += a0[i] * a0[(i + lag) % n0];
    }
    best = std::max(best, std::abs(c) / energy);
  }
  return best;
}

double mutual_coherence(const std::vector<Vec>& kernels) {
  if (kernels.size() < 2) throw DomainError("mutual_coherence: need at least two kernels");
  std::vector<Vec> unit;
  unit.reserve(kernels.size());
  for (const auto& k : kernels) unit.push_back(normalize(k));
  double best = 0.0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    for (std::size_t j = i + 1; j < unit.size(); ++j) {
      const long lo = -static_cast<long>(unit[i].size()) + 1;
      const long hi = static_cast<long>(unit[j].size()) - 1;
      for (long lag = lo; lag <= hi; ++lag) {
        best = std::max(best, std::abs(lagged_dot(unit[i], unit[j], lag)));
      }
    }
  }
  return best;
}

MarginalResult marginal_phi(std::span<const double> a, Extent kernel, std::span<const double> y,
                            Extent signal, double lambda, int budget, double tol) {
  if (a.size() != kernel.size() || y.size() != signal.size()) {
    throw DimensionError("marginal_phi: shape mismatch");
  }
  if (!(lambda >= 0.0)) throw DomainError("marginal_phi: lambda must be >= 0");
  if (std::abs(norm2(a) - 1.0) > kUnitNormTolerance) {
    throw ContractError("marginal_phi: kernel is not unit norm");
  }
  const std::vector<Vec> kernels{Vec(a.begin(), a.end())};
  const double lip = max_power_spectrum(signal, kernel, kernels);
  const double t = lip > 0.0 ? 1.0 / lip : 1.0;
  const std::size_t m = signal.size();

  // Accelerated proximal gradient with gradient-based restart. The stopping
  // measure is the composite gradient mapping at the extrapolated point.
  MarginalResult out;
  Vec x(m, 0.0), x_prev(m, 0.0), w(m, 0.0), step(m);
  double momentum = 1.0;
  for (int it = 1; it <= budget; ++it) {
    Vec r = cconv(signal, w, kernel, a);
    for (std::size_t i = 0; i < m; ++i) r[i] -= y[i];
    const Vec g = ccorr(kernel, a, signal, r);
    for (std::size_t i = 0; i < m; ++i) step[i] = w[i] - t * g[i];
    prox_l1_inplace(step, lambda * t, {}, false);

    double mapping = 0.0, restart = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = w[i] - step[i];
      mapping += d * d;
      restart += d * (step[i] - x[i]);
    }
    x_prev.swap(x);
    x = step;
    out.iterations = it;
    if (std::sqrt(mapping) / t <= tol) {
      out.converged = true;
      break;
    }
    double beta = 0.0;
    if (restart > 0.0) {
      momentum = 1.0;
    } else {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      beta = (momentum - 1.0) / next;
      momentum = next;
    }
    for (std::size_t i = 0; i < m; ++i) w[i] = x[i] + beta * (x[i] - x_prev[i]);
  }
  Vec r = cconv(signal, x, kernel, a);
  for (std::size_t i = 0; i < m; ++i) r[i] -= y[i];
  out.value = 0.5 * dot(r, r) + lambda * norm1(x);
  out.x = std::move(x);
  return out;
}

}  // namespace sasd
