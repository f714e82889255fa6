#pragma once

// Bilinear Lasso
//
//   Ψ(A, X, b) = ½‖Σ_k a_k ⊛ x_k + b·1 − y‖² + λ Σ_k ‖w_k ⊙ x_k‖₁,   ‖a_k‖ = 1,
//
// for 1D signals or 2D grids. Single-kernel deconvolution is the N = 1 case.

#include <cstddef>
#include <span>
#include <vector>

#include "sasd/manifold.hpp"
#include "sasd/types.hpp"

namespace sasd {

/// Observation plus the shapes the unknowns live on.
struct Problem {
  Vec y;
  Extent signal;           // shape of y and of every activation map
  Extent kernel;           // shape of every kernel iterate (3·n0 − 2 for 1D SaSD)
  std::size_t num_kernels = 1;
  bool fit_bias = false;   // estimate a constant offset b alongside (A, X)

  void validate() const;
};

Problem make_problem(Vec y, std::size_t kernel_length, std::size_t num_kernels = 1,
                     bool fit_bias = false);

struct BilinearState {
  ObliquePoint kernels;
  std::vector<Vec> maps;
  double bias = 0.0;
};

struct PenaltyConfig {
  double lambda = 0.0;
  std::vector<Vec> weights;  // one per map; empty means all ones
  bool nonnegative = false;

  void validate(const Problem& problem) const;
};

void validate_state(const Problem& problem, const BilinearState& state);

/// Σ_k cconv(x_k, a_k) + b·1 − y.
Vec residual(const Problem& problem, const BilinearState& state);

double psi_value(const Problem& problem, const BilinearState& state);
double penalty_value(const BilinearState& state, const PenaltyConfig& penalty);
double obj_value(const Problem& problem, const BilinearState& state, const PenaltyConfig& penalty);

/// ∇_{x_k} ψ = ccorr(a_k, residual).
Vec grad_x(const Problem& problem, const BilinearState& state, std::size_t k);
/// Euclidean ∇_{a_k} ψ = restrict(ccorr(x_k, residual)).
Vec egrad_a(const Problem& problem, const BilinearState& state, std::size_t k);
/// Riemannian gradient: tangent projection of egrad_a at a_k.
Vec rgrad_a(const Problem& problem, const BilinearState& state, std::size_t k);

enum class ShiftMode { kLinear, kCyclic };

/// max_{ℓ≠0} |⟨a0, s_ℓ a0⟩| / ‖a0‖². kLinear uses zero-padded shifts, kCyclic
/// wraps within the length-n0 window.
double shift_coherence(std::span<const double> a0, ShiftMode mode = ShiftMode::kLinear);

/// max over kernel pairs i < j and all linear lags of the normalized
/// cross-correlation. Requires at least two kernels.
double mutual_coherence(const std::vector<Vec>& kernels);

struct MarginalResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  Vec x;
};

/// φ(a) = min_x ½‖a ⊛ x − y‖² + λ‖x‖₁, solved from x = 0 until the composite
/// gradient mapping norm is ≤ tol or the budget runs out.
MarginalResult marginal_phi(std::span<const double> a, Extent kernel, std::span<const double> y,
                            Extent signal, double lambda, int budget = 20000,
                            double tol = 1e-8);

}  // namespace sasd
