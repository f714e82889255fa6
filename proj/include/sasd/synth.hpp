#pragma once

// Synthetic short-and-sparse data: kernels, sparse activations and
// observations y = a0 ⊛ x0 + b·1 + noise, in 1D and on 2D grids.

#include <cstdint>
#include <string>

#include "sasd/types.hpp"

namespace sasd {

enum class KernelKind { kDelta, kUniformSphere, kGaussianWindow, kAr1, kAr2 };
enum class ActivationKind { kBernoulli, kBernoulliGaussian, kBernoulliRademacher };

struct KernelSpec {
  KernelKind kind = KernelKind::kUniformSphere;
  std::size_t n0 = 0;
  double sigma = 0.5;      // gaussian window width
  double tau = 0.25;       // AR(1) decay (seconds)
  double tau1 = 0.2;       // AR(2) slow decay
  double tau2 = 0.03;      // AR(2) fast rise
  double rate_hz = 100.0;  // AR sampling rate

  void validate() const;
};

struct ActivationSpec {
  ActivationKind dist = ActivationKind::kBernoulliRademacher;
  std::size_t m = 0;
  double theta = 0.1;

  void validate() const;
};

struct NoiseSpec {
  double sigma = 0.0;
  double bias = 0.0;
};

KernelKind parse_kernel_kind(const std::string& name);
ActivationKind parse_activation_kind(const std::string& name);
std::string to_string(KernelKind kind);
std::string to_string(ActivationKind kind);

/// Unit-norm kernel of length n0. Deterministic in (spec, seed); only the
/// uniform-sphere kind consumes randomness.
Vec gen_kernel(const KernelSpec& spec, std::uint64_t seed);

/// Pre-normalization gaussian window exp(−(2i − n0 − 1)² / (σ² (n0 − 1)²)), i = 1..n0.
Vec gaussian_window(std::size_t n0, double sigma);

Vec gen_activation(const ActivationSpec& spec, std::uint64_t seed);

/// cconv(x0, a0) + bias + σ·N(0, I).
Vec gen_observation(std::span<const double> a0, std::span<const double> x0,
                    const NoiseSpec& noise, std::uint64_t seed);

// 2D ------------------------------------------------------------------------

/// Separable gaussian bump: outer product of two 1D windows, normalized.
/// sigma <= 0 gives the 2D delta.
Image gen_kernel2d(Extent shape, double sigma);
Image gen_activation2d(ActivationKind dist, Extent shape, double theta, std::uint64_t seed);
Image gen_observation2d(const Image& a0, const Image& x0, const NoiseSpec& noise,
                        std::uint64_t seed);

/// Ground truth plus observation for one seeded 1D instance.
struct Instance {
  Vec a0;
  Vec x0;
  Vec y;
};

Instance make_instance(const KernelSpec& kernel, const ActivationSpec& activation,
                       const NoiseSpec& noise, std::uint64_t seed);

}  // namespace sasd
