#include "sasd/synth.hpp"

#include <cmath>
#include <random>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/manifold.hpp"
#include "sasd/rng.hpp"

namespace sasd {

namespace {

double draw_amplitude(ActivationKind dist, std::mt19937_64& rng) {
  switch (dist) {
    case ActivationKind::kBernoulli:
      return 1.0;
    case ActivationKind::kBernoulliGaussian:
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    case ActivationKind::kBernoulliRademacher:
      return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  }
  return 0.0;
}

Vec draw_sparse(ActivationKind dist, std::size_t m, double theta, std::mt19937_64& rng) {
  Vec x(m, 0.0);
  std::bernoulli_distribution on(theta);
  for (double& v : x) {
    if (on(rng)) v = draw_amplitude(dist, rng);
  }
  return x;
}

void add_noise(Vec& y, const NoiseSpec& noise, std::uint64_t seed) {
  if (!(noise.sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
  for (double& v : y) v += noise.bias;
  if (noise.sigma == 0.0) return;
  auto rng = make_rng(seed, Stream::kNoise);
  std::normal_distribution<double> gauss(0.0, noise.sigma);
  for (double& v : y) v += gauss(rng);
}

}  // namespace

void KernelSpec::validate() const {
  if (n0 < 1) throw DomainError("kernel: n0 must be >= 1");
  switch (kind) {
    case KernelKind::kGaussianWindow:
      if (!(sigma > 0.0)) throw DomainError("kernel: gaussian sigma must be positive");
      break;
    case KernelKind::kAr1:
      if (!(tau > 0.0)) throw DomainError("kernel: AR(1) tau must be positive");
      if (!(rate_hz > 0.0)) throw DomainError("kernel: sampling rate must be positive");
      break;
    case KernelKind::kAr2:
      if (!(tau1 > tau2 && tau2 > 0.0)) throw DomainError("kernel: AR(2) needs tau1 > tau2 > 0");
      if (!(rate_hz > 0.0)) throw DomainError("kernel: sampling rate must be positive");
      if (n0 < 2) throw DomainError("kernel: AR(2) needs n0 >= 2");
      break;
    default:
      break;
  }
}

void ActivationSpec::validate() const {
  if (m < 1) throw DomainError("activation: m must be >= 1");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("activation: theta must lie in (0, 1)");
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "delta") return KernelKind::kDelta;
  if (name == "uniform-sphere" || name == "uniform" || name == "sphere" || name == "random") {
    return KernelKind::kUniformSphere;
  }
  if (name == "gaussian-window" || name == "gaussian") return KernelKind::kGaussianWindow;
  if (name == "ar1") return KernelKind::kAr1;
  if (name == "ar2") return KernelKind::kAr2;
  throw DomainError("unknown kernel kind '" + name + "'");
}

ActivationKind parse_activation_kind(const std::string& name) {
  if (name == "B" || name == "bernoulli") return ActivationKind::kBernoulli;
  if (name == "BG" || name == "bernoulli-gaussian") return ActivationKind::kBernoulliGaussian;
  if (name == "BR" || name == "bernoulli-rademacher") return ActivationKind::kBernoulliRademacher;
  throw DomainError("unknown activation distribution '" + name + "'");
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kDelta: return "delta";
    case KernelKind::kUniformSphere: return "uniform-sphere";
    case KernelKind::kGaussianWindow: return "gaussian-window";
    case KernelKind::kAr1: return "ar1";
    case KernelKind::kAr2: return "ar2";
  }
  return "?";
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kBernoulli: return "B";
    case ActivationKind::kBernoulliGaussian: return "BG";
    case ActivationKind::kBernoulliRademacher: return "BR";
  }
  return "?";
}

Vec gaussian_window(std::size_t n0, double sigma) {
  if (n0 < 1) throw DomainError("gaussian_window: n0 must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("gaussian_window: sigma must be positive");
  if (n0 == 1) return Vec{1.0};
  Vec g(n0);
  const double denom = sigma * sigma * static_cast<double>(n0 - 1) * static_cast<double>(n0 - 1);
  for (std::size_t i = 1; i <= n0; ++i) {
    const double u = 2.0 * static_cast<double>(i) - static_cast<double>(n0) - 1.0;
    g[i - 1] = std::exp(-u * u / denom);
  }
  return g;
}

Vec gen_kernel(const KernelSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n0 = spec.n0;
  Vec a(n0, 0.0);
  switch (spec.kind) {
    case KernelKind::kDelta:
      a[0] = 1.0;
      return a;
    case KernelKind::kUniformSphere: {
      auto rng = make_rng(seed, Stream::kKernel);
      std::normal_distribution<double> gauss(0.0, 1.0);
      // A zero draw has probability zero; the loop only guards the degenerate case.
      do {
        for (double& v : a) v = gauss(rng);
      } while (norm2(a) == 0.0);
      break;
    }
    case KernelKind::kGaussianWindow:
      a = gaussian_window(n0, spec.sigma);
      break;
    case KernelKind::kAr1:
      for (std::size_t i = 0; i < n0; ++i) a[i] = std::exp(-(i / spec.rate_hz) / spec.tau);
      break;
    case KernelKind::kAr2:
      for (std::size_t i = 0; i < n0; ++i) {
        const double t = i / spec.rate_hz;
        a[i] = std::exp(-t / spec.tau1) - std::exp(-t / spec.tau2);
      }
      break;
  }
  return normalize(a);
}

Vec gen_activation(const ActivationSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto rng = make_rng(seed, Stream::kActivation);
  return draw_sparse(spec.dist, spec.m, spec.theta, rng);
}

Vec gen_observation(std::span<const double> a0, std::span<const double> x0,
                    const NoiseSpec& noise, std::uint64_t seed) {
  Vec y = cconv(x0, a0);
  add_noise(y, noise, seed);
  return y;
}

Image gen_kernel2d(Extent shape, double sigma) {
  if (shape.size() == 0) throw DimensionError("gen_kernel2d: empty shape");
  Image k(shape.rows, shape.cols);
  if (!(sigma > 0.0)) {
    k(0, 0) = 1.0;
    return k;
  }
  const Vec gr = gaussian_window(shape.rows, sigma);
  const Vec gc = gaussian_window(shape.cols, sigma);
  for (std::size_t i = 0; i < shape.rows; ++i) {
    for (std::size_t j = 0; j < shape.cols; ++j) k(i, j) = gr[i] * gc[j];
  }
  k.values = normalize(k.values);
  return k;
}

Image gen_activation2d(ActivationKind dist, Extent shape, double theta, std::uint64_t seed) {
  if (shape.size() == 0) throw DimensionError("gen_activation2d: empty shape");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("activation: theta must lie in (0, 1)");
  auto rng = make_rng(seed, Stream::kActivation);
  return Image(shape, draw_sparse(dist, shape.size(), theta, rng));
}

Image gen_observation2d(const Image& a0, const Image& x0, const NoiseSpec& noise,
                        std::uint64_t seed) {
  Image y = cconv2d(x0, a0);
  add_noise(y.values, noise, seed);
  return y;
}

Instance make_instance(const KernelSpec& kernel, const ActivationSpec& activation,
                       const NoiseSpec& noise, std::uint64_t seed) {
  Instance inst;
  inst.a0 = gen_kernel(kernel, seed);
  inst.x0 = gen_activation(activation, seed);
  inst.y = gen_observation(inst.a0, inst.x0, noise, seed);
  return inst;
}

}  // namespace sasd
