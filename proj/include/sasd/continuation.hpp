#pragma once

// Outer loops around ADM/iADM: homotopy continuation in λ and iterative
// reweighting of the ℓ1 penalty.

#include <string>
#include <vector>

#include "sasd/solvers.hpp"

namespace sasd {

struct HomotopySchedule {
  double lambda0 = 0.0;        // 0 selects default_lambda0 at the initial point
  double lambda_star = 0.0;
  double eta = 0.9;            // per-stage decay of λ
  double delta = 0.1;          // stage precision ε_k = δ·λ_k
  double eps_star = 1e-6;      // final-stage precision
  int stage_iters = 500;       // iteration cap of every intermediate stage

  void validate() const;
};

/// K = ⌊log(λ★/λ0) / log η⌋.
int stage_count(double lambda0, double lambda_star, double eta);

/// max_k ‖ccorr(a_k, y − b)‖∞: at this penalty the first x-step from x = 0 stays at 0.
double default_lambda0(const Problem& problem, const BilinearState& state);

struct StageInfo {
  int stage = 0;               // 0..K, K+1 for the final round
  double lambda = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  std::string stop_reason;
};

struct ContinuationResult {
  BilinearState state;
  std::vector<IterationRecord> trace;   // concatenated; iteration and fft_ops are cumulative
  std::vector<StageInfo> stages;
  double lambda0 = 0.0;
  int momentum_warnings = 0;
};

/// Runs stages λ_k = η^k λ0 (k = 0..K) to precision δλ_k, then a final stage at λ★
/// with `final_stop` (its stationarity_tol defaults to schedule.eps_star when 0).
/// final_stop.max_fft_ops, when set, bounds the transforms of the whole path.
/// The stepsize τ and the full state carry across stages; momentum restarts.
ContinuationResult homotopy_solve(const Problem& problem, const BilinearState& init,
                                  const HomotopySchedule& schedule, SolverKind kind,
                                  const SolverConfig& base, const StopRule& final_stop);

struct Weights {
  Vec w;
  double eps = 0.0;
};

/// w_i = 1 / (|x_i| + ε), ε = max(|x|_(i0), 1e-3), i0 = ⌈n / log(m / n)⌉ clamped
/// to [1, m], where |x|_(i) is the i-th largest magnitude and n the kernel length.
Weights weight_update(std::span<const double> x, std::size_t n);

/// Reweighted solve: round 0 uses unit weights; each later round warm-starts
/// from the previous one with weights from weight_update. Stops after
/// `rounds` rounds or once successive maps differ by ≤ 1e-6 in ℓ2.
ContinuationResult reweight_solve(const Problem& problem, const BilinearState& init,
                                  SolverKind kind, const SolverConfig& base,
                                  const StopRule& stop, int rounds);

}  // namespace sasd
