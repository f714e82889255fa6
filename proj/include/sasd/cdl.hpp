#pragma once

// Multi-kernel (convolutional dictionary learning) problems and scoring up to
// sign, shift and permutation.

#include <cstdint>
#include <vector>

#include "sasd/objective.hpp"
#include "sasd/synth.hpp"

namespace sasd {

struct CdlInstance {
  std::vector<Vec> kernels;   // ground truth, unit norm, length n0
  std::vector<Vec> maps;      // ground-truth activations, length m
  Problem problem;            // y = Σ a_k ⊛ x_k + b + noise, kernel length 3n0 − 2
};

/// Atom k draws its kernel and activation from sub-seeds derived from (seed, k).
/// All kernels must share n0 and all activations m.
CdlInstance build_cdl_problem(const std::vector<KernelSpec>& kernels,
                              const std::vector<ActivationSpec>& activations,
                              const NoiseSpec& noise, std::uint64_t seed, bool fit_bias = false);

struct CdlScore {
  double error = 1.0;                  // min over permutations of the worst atom error
  std::vector<std::size_t> permutation;  // truth k matched to estimate permutation[k]
  std::vector<double> errors;          // per truth atom under that permutation
  std::vector<long> shifts;            // window offset of each match
};

inline constexpr std::size_t kMaxScoredAtoms = 6;

/// Exhaustive over permutations; throws DomainError for more than 6 atoms or
/// mismatched counts.
CdlScore cdl_score(const std::vector<Vec>& truth, const ObliquePoint& estimate);

/// True when two estimated kernels have normalized cross-correlation above
/// `threshold` at some lag.
bool has_duplicate_kernels(const ObliquePoint& estimate, double threshold = 0.95);

}  // namespace sasd
