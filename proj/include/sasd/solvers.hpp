#pragma once

// Alternating descent on the Bilinear Lasso: a proximal-gradient step in the
// maps followed by a Riemannian gradient step in the kernels, each with its
// own backtracked stepsize. iADM adds an inertial term to both blocks; ADM is
// the β = 0 case of the same iteration.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sasd/objective.hpp"

namespace sasd {

struct StopRule {
  int max_iters = 1000;
  double iterate_tol = 1e-6;       // stop when the scaled iterate change drops below this
  double stationarity_tol = 0.0;   // stop when ‖G_t‖ + ‖grad_a‖ ≤ this (0 disables)
  std::uint64_t max_fft_ops = 0;   // transform budget for this run (0 = unlimited)

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double iterate_delta = 0.0;
  double stationarity = 0.0;
  std::uint64_t fft_ops = 0;   // cumulative transforms since the run started
  double t = 0.0;
  double tau = 0.0;
  double observed = std::numeric_limits<double>::quiet_NaN();  // observer output, if any
};

struct SolverConfig {
  PenaltyConfig penalty;
  double beta = 0.9;          // momentum; 0 gives plain ADM
  double shrink = 0.5;        // backtracking factor for both t and τ
  double armijo = 0.8;        // η of the Riemannian linesearch, in (0.5, 1)
  double initial_tau = 1.0;   // first τ0; later iterations warm-start from 2·τ_prev
  double t_scale = 0.99;      // t0 = t_scale / L
  // Called after every iteration with the new state; its value is stored in
  // IterationRecord::observed. Use for recovery-error traces.
  std::function<double(const BilinearState&)> observer;

  void validate(const Problem& problem) const;
};

/// Per-iteration step bookkeeping shared by the x- and a-updates.
struct StepState {
  double t = 0.0;
  double tau = 1.0;
  double beta = 0.0;
  BilinearState prev;
};

struct SolveResult {
  BilinearState state;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double tau = 1.0;            // last accepted a-stepsize, for warm starts
  int momentum_warnings = 0;   // iterations where β had to be halved
};

enum class SolverKind { kAdm, kIadm };

struct XStep {
  double t = 0.0;
  std::vector<Vec> maps;
  int shrinks = 0;
};

/// Proximal-gradient step on all maps from `at` with kernels fixed. Shrinks t
/// from t0 until the quadratic majorization holds. Throws StepsizeError once
/// t < 1e-20.
XStep backtrack_x(const Problem& problem, const BilinearState& at, const PenaltyConfig& penalty,
                  double t0, double shrink = 0.5);

struct AStep {
  double tau = 0.0;
  ObliquePoint kernels;
  int shrinks = 0;
};

/// Riemannian gradient step on all kernels from `at` with maps fixed.
/// Shrinks τ from τ0 until ψ(R(−τ g)) < ψ(a) − τ η ‖g‖². A zero gradient is
/// accepted immediately with the kernels unchanged.
AStep linesearch_a(const Problem& problem, const BilinearState& at, double tau0,
                   double eta = 0.8, double shrink = 0.5);

/// (1/m)⟨1, y − Σ a_k ⊛ x_k⟩.
double bias_update(const Problem& problem, const BilinearState& state);

SolveResult adm_solve(const Problem& problem, const BilinearState& init, SolverConfig config,
                      const StopRule& stop);
SolveResult iadm_solve(const Problem& problem, const BilinearState& init,
                       const SolverConfig& config, const StopRule& stop);
SolveResult solve(SolverKind kind, const Problem& problem, const BilinearState& init,
                  const SolverConfig& config, const StopRule& stop);

}  // namespace sasd
