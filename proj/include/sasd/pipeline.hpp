#pragma once

// Glue around the solvers: data-driven initialization, removal of the shift
// ambiguity, and recovery metrics.

#include <cstdint>

#include "sasd/objective.hpp"

namespace sasd {

/// Length-(3n0 − 2) sphere point [0_{n0−1}; y_i..y_{i+n0−1}; 0_{n0−1}] / ‖·‖ with
/// the window start i drawn uniformly from [0, m − n0]. All-zero windows are
/// redrawn up to 10 times before a DomainError.
Vec init_kernel(std::span<const double> y, std::size_t n0, std::uint64_t seed);

/// N windows; column 0 equals init_kernel(y, n0, seed), later columns use
/// derived sub-seeds.
ObliquePoint init_multi(std::span<const double> y, std::size_t n0, std::size_t num_kernels,
                        std::uint64_t seed);

/// 2D form: an n0.rows × n0.cols window of y placed at offset (n0 − 1) inside a
/// (3n0 − 2)-sized zero grid, normalized.
Vec init_kernel_2d(const Image& y, Extent n0, std::uint64_t seed);

/// Uniform random point on the sphere of dimension n (the non-data-driven baseline).
Vec random_kernel(std::size_t n, std::uint64_t seed);

/// Starting state for a solve: the given kernels, zero maps, and b = mean(y)
/// when the problem fits a bias.
BilinearState initial_state(const Problem& problem, ObliquePoint kernels);

enum class ShiftSelect { kReconstruction, kMaxEnergy };

struct ShiftCorrection {
  Vec kernel;             // length-n0 window of the estimate
  Vec map;                // activation shifted to match
  long offset = 0;        // window start inside the length-n kernel (i★ − 1)
  long kernel_shift = 0;  // ℓ★ = −offset; align_map(x, ℓ★) gives `map`
  double error = 0.0;     // ‖kernel ⊛ map + b − y‖
};

/// Tries window offsets 0..2n0 of the length-n estimate, pairs each window
/// with the oppositely shifted map, and keeps the offset with the smallest
/// reconstruction error (ties to the smallest offset). kMaxEnergy instead keeps
/// the window of largest energy.
ShiftCorrection shift_correct(std::span<const double> y, std::span<const double> a,
                              std::span<const double> x, std::size_t n0, double bias = 0.0,
                              ShiftSelect select = ShiftSelect::kReconstruction);

struct ShiftCorrection2d {
  Vec kernel;
  Vec map;
  long row_offset = 0;
  long col_offset = 0;
  double error = 0.0;
};

/// Shape-generic form; offsets sweep [0, 2·n0] along each axis.
ShiftCorrection2d shift_correct(Extent signal, std::span<const double> y, Extent kernel,
                                std::span<const double> a, std::span<const double> x,
                                Extent window, double bias = 0.0,
                                ShiftSelect select = ShiftSelect::kReconstruction);

/// Cyclic shift of the map by −ℓ★.
Vec align_map(std::span<const double> x, long kernel_shift);

/// min over window offsets o = 0..2n0−1 of 1 − |⟨â0, window_o(â★)⟩|, with the
/// truth a0 and the full estimate a★ normalized and the window read cyclically.
double recovery_error(std::span<const double> a0, std::span<const double> a_est);
double recovery_error(Extent window, std::span<const double> a0, Extent kernel,
                      std::span<const double> a_est);

struct RecoveryMatch {
  double error = 1.0;
  long row_offset = 0;   // window offset achieving the minimum
  long col_offset = 0;
};
RecoveryMatch recovery_match(Extent window, std::span<const double> a0, Extent kernel,
                             std::span<const double> a_est);

inline constexpr double kRecoveryThreshold = 1e-2;
inline bool recovered(double error) { return error <= kRecoveryThreshold; }

struct SupportScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Matches estimated spikes (|x_i| > threshold) to true spikes (x0_i ≠ 0)
/// one-to-one within ±tolerance samples, cyclically.
SupportScore support_f1(std::span<const double> x0, std::span<const double> x,
                        double threshold, long tolerance = 1);

}  // namespace sasd
