#include <gtest/gtest.h>

#include "sasd/errors.hpp"
#include "sasd/synth.hpp"
#include "support.hpp"

using namespace sasd;
using namespace sasd::test;

TEST(Synth, KernelsAreUnitNormAndSeeded) {
  for (KernelKind kind : {KernelKind::kDelta, KernelKind::kUniformSphere, KernelKind::kGaussianWindow,
                          KernelKind::kAr1, KernelKind::kAr2}) {
    const KernelSpec spec{kind, 25};
    const Vec a = gen_kernel(spec, 9);
    ASSERT_EQ(a.size(), 25u);
    EXPECT_NEAR(l2(a), 1.0, 1e-14) << to_string(kind);
    EXPECT_EQ(gen_kernel(spec, 9), a);
    EXPECT_EQ(parse_kernel_kind(to_string(kind)), kind);
  }
  EXPECT_NE(gen_kernel({KernelKind::kUniformSphere, 25}, 1), gen_kernel({KernelKind::kUniformSphere, 25}, 2));
  EXPECT_EQ(gen_kernel({KernelKind::kGaussianWindow, 25}, 1), gen_kernel({KernelKind::kGaussianWindow, 25}, 2));
}

TEST(Synth, GaussianWindowFormula) {
  const std::size_t n0 = 11;
  const double sigma = 0.5;
  const Vec g = gaussian_window(n0, sigma);
  for (std::size_t i = 1; i <= n0; ++i) {
    const double u = 2.0 * i - n0 - 1.0;
    EXPECT_DOUBLE_EQ(g[i - 1], std::exp(-u * u / (sigma * sigma * 100.0)));
  }
  EXPECT_DOUBLE_EQ(g[5], 1.0);
  EXPECT_DOUBLE_EQ(g[0], g[10]);
  EXPECT_THROW(gaussian_window(5, 0.0), DomainError);
}

TEST(Synth, ArKernelsHaveExpectedShape) {
  KernelSpec s{KernelKind::kAr1, 30};
  const Vec a1 = gen_kernel(s, 0);
  for (int i = 1; i < 30; ++i) EXPECT_NEAR(a1[i] / a1[i - 1], std::exp(-0.01 / 0.25), 1e-12);
  s.kind = KernelKind::kAr2;
  const Vec a2 = gen_kernel(s, 0);
  EXPECT_EQ(a2[0], 0.0);
  // Rise then decay.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < a2.size(); ++i) {
    EXPECT_GE(a2[i], 0.0);
    if (a2[i] > a2[peak]) peak = i;
  }
  EXPECT_GT(peak, 0u);
  EXPECT_LT(peak, 29u);
  s.tau2 = s.tau1;
  EXPECT_THROW(gen_kernel(s, 0), DomainError);
}

TEST(Synth, ActivationStatistics) {
  const ActivationSpec spec{ActivationKind::kBernoulliRademacher, 200000, 0.05};
  const Vec x = gen_activation(spec, 3);
  double nnz = 0.0, sum = 0.0;
  for (double v : x) {
    if (v != 0.0) {
      ++nnz;
      EXPECT_EQ(std::abs(v), 1.0);
      sum += v;
    }
  }
  EXPECT_NEAR(nnz / 200000, 0.05, 0.003);
  EXPECT_NEAR(sum / nnz, 0.0, 0.05);
  const Vec b = gen_activation({ActivationKind::kBernoulli, 1000, 0.1}, 3);
  for (double v : b) EXPECT_TRUE(v == 0.0 || v == 1.0);
  EXPECT_EQ(gen_activation(spec, 3), x);
  EXPECT_THROW(gen_activation({ActivationKind::kBernoulli, 10, 1.0}, 1), DomainError);
  EXPECT_THROW(gen_activation({ActivationKind::kBernoulli, 10, 0.0}, 1), DomainError);
}

TEST(Synth, ObservationAndNoise) {
  std::mt19937_64 rng(4);
  const Vec a = unit_vec(rng, 5), x = uniform_vec(rng, 50);
  const Vec clean = gen_observation(a, x, {}, 1);
  EXPECT_LT(rel_err(clean, oracle_cconv(x, a)), 1e-12);
  const Vec biased = gen_observation(a, x, {0.0, 2.0}, 1);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(biased[i] - clean[i], 2.0, 1e-12);
  const Vec x2(20000, 0.0);
  const Vec noisy = gen_observation(Vec{1.0}, x2, {0.3, 0.0}, 7);
  double ss = 0.0;
  for (double v : noisy) ss += v * v;
  EXPECT_NEAR(std::sqrt(ss / 20000), 0.3, 0.01);
  EXPECT_EQ(gen_observation(Vec{1.0}, x2, {0.3, 0.0}, 7), noisy);
}

TEST(Synth, InstanceStreamsAreIndependent) {
  // Changing m must not change the kernel; changing the noise must not change x0.
  const KernelSpec k{KernelKind::kUniformSphere, 10};
  const Instance a = make_instance(k, {ActivationKind::kBernoulliRademacher, 100, 0.1}, {}, 5);
  const Instance b = make_instance(k, {ActivationKind::kBernoulliRademacher, 200, 0.1}, {0.1, 0.0}, 5);
  EXPECT_EQ(a.a0, b.a0);
  const Instance c = make_instance(k, {ActivationKind::kBernoulliRademacher, 100, 0.1}, {0.1, 0.0}, 5);
  EXPECT_EQ(a.x0, c.x0);
  EXPECT_NE(a.y, c.y);
}

TEST(Synth, TwoDimensional) {
  const Image k = gen_kernel2d(Extent{5, 7}, 0.5);
  EXPECT_NEAR(l2(k.values), 1.0, 1e-14);
  const Vec gr = gaussian_window(5, 0.5), gc = gaussian_window(7, 0.5);
  EXPECT_NEAR(k(1, 2) / k(2, 3), gr[1] * gc[2] / (gr[2] * gc[3]), 1e-12);
  const Image d = gen_kernel2d(Extent{3, 3}, 0.0);
  EXPECT_EQ(d(0, 0), 1.0);
  const Image x = gen_activation2d(ActivationKind::kBernoulli, Extent{40, 30}, 0.1, 2);
  const Image y = gen_observation2d(k, x, {}, 2);
  EXPECT_LT(rel_err(y.values, oracle_cconv2d(x.values, 40, 30, k.values, 5, 7)), 1e-12);
}
