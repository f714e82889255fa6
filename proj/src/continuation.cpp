#include "sasd/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"

namespace sasd {

namespace {

constexpr double kReweightTol = 1e-6;

// Appends a stage trace with iteration numbers and transform counts offset so
// the concatenation reads as one run.
void append_trace(ContinuationResult& out, const SolveResult& r) {
  int it0 = 0;
  std::uint64_t ops0 = 0;
  if (!out.trace.empty()) {
    it0 = out.trace.back().iteration;
    ops0 = out.trace.back().fft_ops;
  }
  for (IterationRecord rec : r.trace) {
    rec.iteration += it0;
    rec.fft_ops += ops0;
    out.trace.push_back(rec);
  }
  out.momentum_warnings += r.momentum_warnings;
}

std::uint64_t used_ops(const ContinuationResult& out) {
  return out.trace.empty() ? 0 : out.trace.back().fft_ops;
}

template <typename Fn>
SolveResult tagged(const char* what, int index, Fn&& fn) {
  try {
    return fn();
  } catch (const StepsizeError& e) {
    throw StepsizeError(std::string(what) + " " + std::to_string(index) + ": " + e.what(),
                        e.iteration());
  }
}

}  // namespace

void HomotopySchedule::validate() const {
  if (!(lambda_star > 0.0)) throw DomainError("homotopy: lambda_star must be positive");
  if (!(lambda0 == 0.0 || lambda0 >= lambda_star)) {
    throw DomainError("homotopy: lambda0 must be >= lambda_star");
  }
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("homotopy: eta must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("homotopy: delta must lie in (0, 1)");
  if (!(eps_star > 0.0)) throw DomainError("homotopy: eps_star must be positive");
  if (stage_iters < 1) throw DomainError("homotopy: stage_iters must be >= 1");
}

int stage_count(double lambda0, double lambda_star, double eta) {
  if (!(lambda0 > 0.0 && lambda_star > 0.0)) throw DomainError("stage_count: penalties must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("stage_count: eta must lie in (0, 1)");
  const double k = std::floor(std::log(lambda_star / lambda0) / std::log(eta));
  return std::max(0, static_cast<int>(k));
}

double default_lambda0(const Problem& problem, const BilinearState& state) {
  validate_state(problem, state);
  Vec yb = problem.y;
  for (double& v : yb) v -= state.bias;
  double best = 0.0;
  for (const auto& a : state.kernels) {
    best = std::max(best, norm_inf(ccorr(problem.kernel, a, problem.signal, yb)));
  }
  return best;
}

ContinuationResult homotopy_solve(const Problem& problem, const BilinearState& init,
                                  const HomotopySchedule& schedule, SolverKind kind,
                                  const SolverConfig& base, const StopRule& final_stop) {
  schedule.validate();
  final_stop.validate();
  ContinuationResult out;
  out.state = init;
  double lambda0 = schedule.lambda0 > 0.0 ? schedule.lambda0 : default_lambda0(problem, init);
  // A starting point already sparse at λ★ needs no path.
  lambda0 = std::max(lambda0, schedule.lambda_star);
  out.lambda0 = lambda0;
  // λ0 = λ★ degenerates to the final round alone.
  const int K = lambda0 > schedule.lambda_star
                    ? stage_count(lambda0, schedule.lambda_star, schedule.eta)
                    : -1;

  SolverConfig cfg = base;
  const std::uint64_t budget = final_stop.max_fft_ops;
  auto out_of_budget = [&] { return budget > 0 && used_ops(out) >= budget; };

  double lambda = lambda0;
  for (int k = 0; k <= K && !out_of_budget(); ++k) {
    StopRule stop;
    stop.max_iters = schedule.stage_iters;
    stop.iterate_tol = final_stop.iterate_tol;
    stop.stationarity_tol = schedule.delta * lambda;
    stop.max_fft_ops = budget > 0 ? budget - used_ops(out) : 0;
    cfg.penalty.lambda = lambda;
    const SolveResult r =
        tagged("stage", k, [&] { return solve(kind, problem, out.state, cfg, stop); });
    append_trace(out, r);
    out.stages.push_back({k, lambda, stop.stationarity_tol, r.iterations, r.stop_reason});
    out.state = r.state;
    cfg.initial_tau = r.tau;
    lambda *= schedule.eta;
  }

  if (!out_of_budget()) {
    StopRule stop = final_stop;
    if (stop.stationarity_tol == 0.0) stop.stationarity_tol = schedule.eps_star;
    if (budget > 0) stop.max_fft_ops = budget - used_ops(out);
    cfg.penalty.lambda = schedule.lambda_star;
    const SolveResult r =
        tagged("stage", K + 1, [&] { return solve(kind, problem, out.state, cfg, stop); });
    append_trace(out, r);
    out.stages.push_back({K + 1, schedule.lambda_star, stop.stationarity_tol, r.iterations,
                          r.stop_reason});
    out.state = r.state;
  }
  return out;
}

Weights weight_update(std::span<const double> x, std::size_t n) {
  const std::size_t m = x.size();
  Weights out;
  out.eps = 1e-3;
  if (m == 0) return out;
  std::size_t i0 = m;
  if (n > 0 && m > n) {
    const double ratio = std::log(static_cast<double>(m) / static_cast<double>(n));
    i0 = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / ratio));
  }
  i0 = std::clamp<std::size_t>(i0, 1, m);
  Vec mag(m);
  for (std::size_t i = 0; i < m; ++i) mag[i] = std::abs(x[i]);
  Vec sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(i0 - 1), sorted.end(),
                   std::greater<double>());
  out.eps = std::max(sorted[i0 - 1], 1e-3);
  out.w.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.w[i] = 1.0 / (mag[i] + out.eps);
  return out;
}

ContinuationResult reweight_solve(const Problem& problem, const BilinearState& init,
                                  SolverKind kind, const SolverConfig& base,
                                  const StopRule& stop, int rounds) {
  if (rounds < 1) throw DomainError("reweight_solve: rounds must be >= 1");
  stop.validate();
  ContinuationResult out;
  out.state = init;
  out.lambda0 = base.penalty.lambda;
  SolverConfig cfg = base;
  cfg.penalty.weights.clear();
  const std::uint64_t budget = stop.max_fft_ops;

  for (int round = 0; round < rounds; ++round) {
    if (budget > 0 && used_ops(out) >= budget) break;
    StopRule s = stop;
    if (budget > 0) s.max_fft_ops = budget - used_ops(out);
    const std::vector<Vec> before = out.state.maps;
    const SolveResult r =
        tagged("round", round, [&] { return solve(kind, problem, out.state, cfg, s); });
    append_trace(out, r);
    out.stages.push_back({round, cfg.penalty.lambda, s.stationarity_tol, r.iterations,
                          r.stop_reason});
    out.state = r.state;
    cfg.initial_tau = r.tau;

    double change = 0.0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      for (std::size_t i = 0; i < before[k].size(); ++i) {
        const double d = out.state.maps[k][i] - before[k][i];
        change += d * d;
      }
    }
    if (round > 0 && std::sqrt(change) <= kReweightTol) break;

    cfg.penalty.weights.clear();
    for (const auto& x : out.state.maps) {
      cfg.penalty.weights.push_back(weight_update(x, problem.kernel.size()).w);
    }
  }
  return out;
}

}  // namespace sasd
