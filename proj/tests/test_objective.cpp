#include <gtest/gtest.h>

#include "sasd/errors.hpp"
#include "sasd/manifold.hpp"
#include "sasd/objective.hpp"
#include "support.hpp"

using namespace sasd;
using namespace sasd::test;

namespace {

// Random problem plus state with `N` kernels on the given shapes.
struct Fixture {
  Problem p;
  BilinearState s;
};

Fixture random_setup(std::mt19937_64& rng, Extent signal, Extent kernel, std::size_t N, bool bias) {
  Fixture out;
  out.p.y = uniform_vec(rng, signal.size());
  out.p.signal = signal;
  out.p.kernel = kernel;
  out.p.num_kernels = N;
  out.p.fit_bias = bias;
  for (std::size_t k = 0; k < N; ++k) {
    out.s.kernels.push_back(unit_vec(rng, kernel.size()));
    Vec x = uniform_vec(rng, signal.size());
    for (double& v : x) v = std::abs(v) < 0.6 ? 0.0 : v;
    out.s.maps.push_back(x);
  }
  out.s.bias = bias ? 0.3 : 0.0;
  return out;
}

// Directional derivative of ψ in x_k along d by central differences. ψ is
// quadratic in x, so the difference quotient is exact up to rounding.
double fd_x(const Fixture& st, std::size_t k, const Vec& d, double h) {
  BilinearState plus = st.s, minus = st.s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    plus.maps[k][i] += h * d[i];
    minus.maps[k][i] -= h * d[i];
  }
  return (psi_value(st.p, plus) - psi_value(st.p, minus)) / (2 * h);
}

// Derivative of t ↦ ψ(exp_a(t v)) at 0, v tangent at a_k.
double fd_sphere(const Fixture& st, std::size_t k, const Vec& v, double h) {
  BilinearState plus = st.s, minus = st.s;
  Vec hv = v, mhv = v;
  for (std::size_t i = 0; i < v.size(); ++i) {
    hv[i] *= h;
    mhv[i] *= -h;
  }
  plus.kernels[k] = retract_exp(st.s.kernels[k], hv);
  minus.kernels[k] = retract_exp(st.s.kernels[k], mhv);
  return (psi_value(st.p, plus) - psi_value(st.p, minus)) / (2 * h);
}

void check_gradients(std::mt19937_64& rng, Extent signal, Extent kernel, std::size_t N, bool bias) {
  const Fixture st = random_setup(rng, signal, kernel, N, bias);
  for (std::size_t k = 0; k < N; ++k) {
    const Vec d = uniform_vec(rng, signal.size());
    const double want = fd_x(st, k, d, 1e-3);
    const double got = inner(grad_x(st.p, st.s, k), d);
    EXPECT_LE(std::abs(got - want), 1e-5 * std::max(1.0, std::abs(want)));

    Vec v = uniform_vec(rng, kernel.size());
    const double c = inner(v, st.s.kernels[k]);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * st.s.kernels[k][i];
    const Vec g = rgrad_a(st.p, st.s, k);
    EXPECT_NEAR(inner(g, st.s.kernels[k]), 0.0, 1e-10 * std::max(1.0, l2(g)));
    const double want_a = fd_sphere(st, k, v, 1e-5);
    const double got_a = inner(g, v);
    EXPECT_LE(std::abs(got_a - want_a), 1e-5 * std::max(1.0, std::abs(want_a)));
  }
}

}  // namespace

TEST(Objective, ResidualByHand) {
  Problem p = make_problem(Vec{1, 0, 0, 0}, 2);
  BilinearState s{{Vec{0.6, 0.8}}, {Vec{1, 0, 0, 2}}, 0.5};
  // a ⊛ x = [0.6 + 1.6, 0.8, 0, 1.2]
  const Vec r = residual(p, s);
  const Vec want{0.6 + 1.6 + 0.5 - 1, 0.8 + 0.5, 0.5, 1.2 + 0.5};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r[i], want[i], 1e-14);
  EXPECT_NEAR(psi_value(p, s), 0.5 * inner(want, want), 1e-13);
  PenaltyConfig pen{0.25, {}, false};
  EXPECT_NEAR(obj_value(p, s, pen), 0.5 * inner(want, want) + 0.25 * 3.0, 1e-13);
  pen.weights = {Vec{1, 1, 1, 0.5}};
  EXPECT_NEAR(penalty_value(s, pen), 0.25 * 2.0, 1e-14);
}

TEST(Objective, ShapeErrors) {
  Problem p = make_problem(Vec(10, 0.0), 4);
  BilinearState s{{Vec{1, 0, 0, 0}}, {Vec(9, 0.0)}, 0.0};
  EXPECT_THROW(residual(p, s), DimensionError);
  EXPECT_THROW(make_problem(Vec(3, 0.0), 4), DimensionError);
}

TEST(Gradients, SingleKernel1d) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) check_gradients(rng, Extent{120}, Extent{13}, 1, rep % 2);
}

TEST(Gradients, TwoKernels1d) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 15; ++rep) check_gradients(rng, Extent{90}, Extent{10}, 2, false);
}

TEST(Gradients, TwoDimensional) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) check_gradients(rng, Extent{12, 10}, Extent{4, 3}, 1, false);
  for (int rep = 0; rep < 5; ++rep) check_gradients(rng, Extent{10, 10}, Extent{3, 3}, 2, true);
}

TEST(Gradients, EuclideanGradientAgainstDirectSum) {
  std::mt19937_64 rng(4);
  const Fixture st = random_setup(rng, Extent{40}, Extent{7}, 1, false);
  const Vec r = residual(st.p, st.s);
  // ∂ψ/∂a_j = Σ_i r_i x_{i−j}
  Vec want(7, 0.0);
  for (long j = 0; j < 7; ++j) {
    for (long i = 0; i < 40; ++i) want[j] += r[i] * st.s.maps[0][mod(i - j, 40)];
  }
  EXPECT_LT(rel_err(egrad_a(st.p, st.s, 0), want), 1e-12);
}

TEST(Coherence, ShiftCoherenceAgainstBruteForce) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Vec a = uniform_vec(rng, 9);
    const long n = 9;
    double lin = 0.0, cyc = 0.0, e = inner(a, a);
    for (long l = 1; l < n; ++l) {
      double sl = 0.0, sc = 0.0;
      for (long i = 0; i < n; ++i) {
        if (i + l < n) sl += a[i] * a[i + l];
        sc += a[i] * a[mod(i + l, n)];
      }
      lin = std::max(lin, std::abs(sl) / e);
      cyc = std::max(cyc, std::abs(sc) / e);
    }
    EXPECT_NEAR(shift_coherence(a), lin, 1e-14);
    EXPECT_NEAR(shift_coherence(a, ShiftMode::kCyclic), cyc, 1e-14);
  }
}

TEST(Coherence, Extremes) {
  EXPECT_DOUBLE_EQ(shift_coherence(Vec{0, 1, 0, 0}), 0.0);
  EXPECT_NEAR(shift_coherence(Vec(5, 1.0)), 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(shift_coherence(Vec(5, 1.0), ShiftMode::kCyclic), 1.0, 1e-15);
  EXPECT_THROW(shift_coherence(Vec(4, 0.0)), DomainError);
}

TEST(Coherence, MutualAgainstBruteForce) {
  std::mt19937_64 rng(6);
  const std::vector<Vec> ks{uniform_vec(rng, 6), uniform_vec(rng, 6), uniform_vec(rng, 6)};
  double want = 0.0;
  for (int p = 0; p < 3; ++p) {
    for (int q = p + 1; q < 3; ++q) {
      for (long l = -5; l <= 5; ++l) {
        double s = 0.0;
        for (long i = 0; i < 6; ++i) {
          if (i + l >= 0 && i + l < 6) s += ks[p][i] * ks[q][i + l];
        }
        want = std::max(want, std::abs(s) / (l2(ks[p]) * l2(ks[q])));
      }
    }
  }
  EXPECT_NEAR(mutual_coherence(ks), want, 1e-14);
  EXPECT_NEAR(mutual_coherence({ks[0], ks[0]}), 1.0, 1e-14);
  EXPECT_THROW(mutual_coherence({ks[0]}), DomainError);
}

TEST(Marginal, DeltaKernelHasClosedForm) {
  // With a = e_1, φ = Σ_i min_x ½(x − y_i)² + λ|x|: Huber-type closed form.
  std::mt19937_64 rng(7);
  const Vec y = uniform_vec(rng, 64, -2, 2);
  Vec a(7, 0.0);
  a[0] = 1.0;
  const double lambda = 0.3;
  double want = 0.0;
  for (double v : y) want += std::abs(v) > lambda ? lambda * std::abs(v) - 0.5 * lambda * lambda : 0.5 * v * v;
  const MarginalResult r = marginal_phi(a, Extent{7}, y, Extent{64}, lambda);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, want, 1e-10);
}

TEST(Marginal, NoSparsityIsLeastSquares) {
  // λ = 0 and an invertible circulant: φ = 0.
  std::mt19937_64 rng(8);
  const Vec y = uniform_vec(rng, 32);
  const Vec a = normalize(Vec{1.0, 0.3});
  const MarginalResult r = marginal_phi(a, Extent{2}, y, Extent{32}, 0.0, 20000, 1e-10);
  EXPECT_LT(r.value, 1e-14);
}

TEST(Marginal, RejectsOffSphere) {
  EXPECT_THROW(marginal_phi(Vec{1.0, 1.0}, Extent{2}, Vec(8, 1.0), Extent{8}, 0.1), ContractError);
}
