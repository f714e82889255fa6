#include "sasd/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/prox.hpp"

namespace sasd {

namespace {

constexpr double kStepFloor = 1e-20;

// Σ_k a_k ⊛ v_k over the signal grid.
Vec synthesize(const Problem& p, const ObliquePoint& kernels, const std::vector<Vec>& maps) {
  Vec out(p.signal.size(), 0.0);
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    const Vec c = cconv(p.signal, maps[k], p.kernel, kernels[k]);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  }
  return out;
}

Vec residual_of(const Problem& p, const ObliquePoint& kernels, const std::vector<Vec>& maps,
                double bias) {
  Vec r = synthesize(p, kernels, maps);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += bias - p.y[i];
  return r;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct XOutcome {
  double t = 0.0;
  std::vector<Vec> maps;
  Vec r;                  // residual at the new maps
  double mapping = 0.0;   // composite gradient mapping norm ‖w − P‖ / t
  int shrinks = 0;
};

// Prox-gradient step from maps w whose residual is r_w. Acceptance is the
// majorization ψ(P) ≤ ψ(w) + ⟨∇ψ(w), d⟩ + ‖d‖²/(2t) with d = P − w. For the
// quadratic ψ the gap is exactly ½‖Σ a_k ⊛ d_k‖², so the test is evaluated in
// that form, which stays accurate when d is tiny.
XOutcome x_step(const Problem& p, const ObliquePoint& kernels, const std::vector<Vec>& w,
                const Vec& r_w, const PenaltyConfig& pen, double t0, double shrink,
                int iteration) {
  const std::size_t nk = kernels.size();
  std::vector<Vec> grad(nk);
  for (std::size_t k = 0; k < nk; ++k) grad[k] = ccorr(p.kernel, kernels[k], p.signal, r_w);

  XOutcome out;
  out.maps.resize(nk);
  std::vector<Vec> d(nk);
  double t = t0;
  for (;;) {
    double dd = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      Vec& pk = out.maps[k];
      pk.resize(w[k].size());
      for (std::size_t i = 0; i < pk.size(); ++i) pk[i] = w[k][i] - t * grad[k][i];
      const std::span<const double> weights =
          pen.weights.empty() ? std::span<const double>{} : std::span<const double>(pen.weights[k]);
      prox_l1_inplace(pk, pen.lambda * t, weights, pen.nonnegative);
      d[k].resize(pk.size());
      for (std::size_t i = 0; i < pk.size(); ++i) d[k][i] = pk[i] - w[k][i];
      dd += dot(d[k], d[k]);
    }
    if (dd == 0.0) {
      out.r = r_w;
      break;
    }
    Vec ad = synthesize(p, kernels, d);
    if (t * dot(ad, ad) <= dd) {
      out.r = r_w;
      for (std::size_t i = 0; i < ad.size(); ++i) out.r[i] += ad[i];
      out.mapping = std::sqrt(dd) / t;
      break;
    }
    t *= shrink;
    ++out.shrinks;
    if (t < kStepFloor) {
      throw StepsizeError("x-step: stepsize underflow at iteration " + std::to_string(iteration),
                          iteration);
    }
  }
  out.t = t;
  return out;
}

struct AOutcome {
  double tau = 0.0;
  ObliquePoint kernels;
  Vec r;
  double grad_norm = 0.0;
  int shrinks = 0;
};

// Armijo search along the geodesic from z in direction −grad. The decrease is
// computed from the residual increment Δr = Σ Δa_k ⊛ x_k, with Δa_k the exact
// retraction increment, so tiny steps are not lost to cancellation.
AOutcome a_step(const Problem& p, const ObliquePoint& z, const std::vector<Vec>& maps,
                const Vec& r_z, double tau0, double eta, double shrink, int iteration) {
  const std::size_t nk = z.size();
  std::vector<Vec> grad(nk);
  double g2 = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    const Vec full = ccorr(p.signal, maps[k], p.signal, r_z);
    grad[k] = tangent_project(z[k], restrict_to(p.signal, full, p.kernel));
    g2 += dot(grad[k], grad[k]);
  }

  AOutcome out;
  out.grad_norm = std::sqrt(g2);
  if (g2 == 0.0) {
    out.tau = tau0;
    out.kernels = z;
    out.r = r_z;
    return out;
  }
  double tau = tau0;
  std::vector<Vec> inc(nk), step(nk);
  for (;;) {
    for (std::size_t k = 0; k < nk; ++k) {
      step[k] = grad[k];
      for (double& v : step[k]) v *= -tau;
      inc[k] = retract_exp_increment(z[k], step[k]);
    }
    const Vec dr = synthesize(p, inc, maps);
    const double dpsi = dot(dr, r_z) + 0.5 * dot(dr, dr);
    if (dpsi < -tau * eta * g2) {
      // Renormalize: rounding off the sphere would otherwise be amplified
      // by the inverse retraction of the next inertial step.
      out.kernels = z;
      for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t i = 0; i < inc[k].size(); ++i) out.kernels[k][i] += inc[k][i];
        out.kernels[k] = normalize(out.kernels[k]);
      }
      out.r = r_z;
      for (std::size_t i = 0; i < dr.size(); ++i) out.r[i] += dr[i];
      break;
    }
    tau *= shrink;
    ++out.shrinks;
    if (tau < kStepFloor) {
      throw StepsizeError("a-step: stepsize underflow at iteration " + std::to_string(iteration),
                          iteration);
    }
  }
  out.tau = tau;
  return out;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

SolveResult run(const Problem& p, const BilinearState& init, const SolverConfig& cfg,
                const StopRule& stop) {
  p.validate();
  validate_state(p, init);
  cfg.validate(p);
  stop.validate();

  const std::uint64_t fft0 = fft_transform_count();
  const std::size_t nk = p.num_kernels;
  const double sqrt_m = std::sqrt(static_cast<double>(p.signal.size()));

  SolveResult res;
  res.state = init;
  BilinearState& s = res.state;
  StepState step{0.0, cfg.initial_tau, cfg.beta, init};
  Vec r = residual_of(p, s.kernels, s.maps, s.bias);
  bool first_tau = true;

  for (int it = 1; it <= stop.max_iters; ++it) {
    // Inertial direction for the kernels: continue the geodesic from a_prev
    // through a by β times its length. This is the log map at a_prev carried
    // to a along that geodesic, so it stays tangent at a.
    double beta = step.beta;
    std::vector<Vec> back(nk);
    bool a_inertia = beta > 0.0;
    if (a_inertia) {
      try {
        back = oblique_retract_inverse(s.kernels, step.prev.kernels);
      } catch (const SingularityError& e) {
        beta *= 0.5;
        a_inertia = false;
        ++res.momentum_warnings;
        std::clog << "sasd: warning: iteration " << it << ": " << e.what()
                  << "; momentum halved for this iteration\n";
      }
    }

    // x-step at w = x + β(x − x_prev).
    std::vector<Vec> w = s.maps;
    Vec r_w;
    if (beta > 0.0) {
      for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t i = 0; i < w[k].size(); ++i) {
          w[k][i] += beta * (s.maps[k][i] - step.prev.maps[k][i]);
        }
      }
      r_w = residual_of(p, s.kernels, w, s.bias);
    } else {
      r_w = r;
    }
    const double lip = max_power_spectrum(p.signal, p.kernel, s.kernels);
    const double t0 = lip > 0.0 ? cfg.t_scale / lip : 1.0;
    XOutcome xs = x_step(p, s.kernels, w, r_w, cfg.penalty, t0, cfg.shrink, it);
    step.t = xs.t;

    // a-step at z = R_a(−β log_a(a_prev)).
    ObliquePoint z;
    Vec r_z;
    bool moved = false;
    if (a_inertia) {
      z.resize(nk);
      for (std::size_t k = 0; k < nk; ++k) {
        Vec v = back[k];
        for (double& e : v) e *= -beta;
        z[k] = retract_exp(s.kernels[k], v);
        moved = moved || z[k] != s.kernels[k];
      }
    }
    if (moved) {
      r_z = residual_of(p, z, xs.maps, s.bias);
    } else {
      z = s.kernels;
      r_z = std::move(xs.r);
    }
    const double tau0 = first_tau ? step.tau : std::max(2.0 * step.tau, 1e-12);
    AOutcome as = a_step(p, z, xs.maps, r_z, tau0, cfg.armijo, cfg.shrink, it);
    first_tau = false;
    step.tau = as.tau;

    // Iterate bookkeeping.
    double delta = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      delta = std::max(delta, std::sqrt(sq_dist(as.kernels[k], s.kernels[k])));
      delta = std::max(delta, std::sqrt(sq_dist(xs.maps[k], s.maps[k])) / sqrt_m);
    }
    step.prev.kernels = std::move(s.kernels);
    step.prev.maps = std::move(s.maps);
    s.kernels = std::move(as.kernels);
    s.maps = std::move(xs.maps);
    r = std::move(as.r);

    if (p.fit_bias) {
      const double shift = mean(r);
      s.bias -= shift;
      for (double& v : r) v -= shift;
    }

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = 0.5 * dot(r, r) + penalty_value(s, cfg.penalty);
    rec.iterate_delta = delta;
    rec.stationarity = xs.mapping + as.grad_norm;
    rec.fft_ops = fft_transform_count() - fft0;
    rec.t = step.t;
    rec.tau = step.tau;
    if (cfg.observer) rec.observed = cfg.observer(s);
    res.trace.push_back(rec);
    res.iterations = it;

    if (delta <= stop.iterate_tol) {
      res.converged = true;
      res.stop_reason = "iterate_tol";
      break;
    }
    if (stop.stationarity_tol > 0.0 && rec.stationarity <= stop.stationarity_tol) {
      res.converged = true;
      res.stop_reason = "stationarity";
      break;
    }
    if (stop.max_fft_ops > 0 && rec.fft_ops >= stop.max_fft_ops) {
      res.stop_reason = "fft_budget";
      break;
    }
  }
  if (res.stop_reason.empty()) res.stop_reason = "max_iters";
  res.tau = step.tau;
  return res;
}

}  // namespace

void StopRule::validate() const {
  if (max_iters < 1) throw DomainError("stop rule: max_iters must be >= 1");
  if (!(iterate_tol >= 0.0)) throw DomainError("stop rule: iterate_tol must be >= 0");
  if (!(stationarity_tol >= 0.0)) throw DomainError("stop rule: stationarity_tol must be >= 0");
}

void SolverConfig::validate(const Problem& problem) const {
  penalty.validate(problem);
  if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("solver: beta must lie in [0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("solver: shrink must lie in (0, 1)");
  if (!(armijo > 0.5 && armijo < 1.0)) throw DomainError("solver: armijo must lie in (0.5, 1)");
  if (!(initial_tau > 0.0)) throw DomainError("solver: initial_tau must be positive");
  if (!(t_scale > 0.0 && t_scale <= 1.0)) throw DomainError("solver: t_scale must lie in (0, 1]");
}

XStep backtrack_x(const Problem& problem, const BilinearState& at, const PenaltyConfig& penalty,
                  double t0, double shrink) {
  problem.validate();
  validate_state(problem, at);
  penalty.validate(problem);
  if (!(t0 > 0.0)) throw DomainError("backtrack_x: t0 must be positive");
  const Vec r = residual_of(problem, at.kernels, at.maps, at.bias);
  XOutcome o = x_step(problem, at.kernels, at.maps, r, penalty, t0, shrink, 0);
  return XStep{o.t, std::move(o.maps), o.shrinks};
}

AStep linesearch_a(const Problem& problem, const BilinearState& at, double tau0, double eta,
                   double shrink) {
  problem.validate();
  validate_state(problem, at);
  if (!(tau0 > 0.0)) throw DomainError("linesearch_a: tau0 must be positive");
  const Vec r = residual_of(problem, at.kernels, at.maps, at.bias);
  AOutcome o = a_step(problem, at.kernels, at.maps, r, tau0, eta, shrink, 0);
  return AStep{o.tau, std::move(o.kernels), o.shrinks};
}

double bias_update(const Problem& problem, const BilinearState& state) {
  validate_state(problem, state);
  const Vec fit = synthesize(problem, state.kernels, state.maps);
  double s = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) s += problem.y[i] - fit[i];
  return s / static_cast<double>(fit.size());
}

SolveResult adm_solve(const Problem& problem, const BilinearState& init, SolverConfig config,
                      const StopRule& stop) {
  config.beta = 0.0;
  return run(problem, init, config, stop);
}

SolveResult iadm_solve(const Problem& problem, const BilinearState& init,
                       const SolverConfig& config, const StopRule& stop) {
  return run(problem, init, config, stop);
}

SolveResult solve(SolverKind kind, const Problem& problem, const BilinearState& init,
                  const SolverConfig& config, const StopRule& stop) {
  return kind == SolverKind::kAdm ? adm_solve(problem, init, config, stop)
                                  : iadm_solve(problem, init, config, stop);
}

}  // namespace sasd
