#include <gtest/gtest.h>

#include "sasd/errors.hpp"
#include "sasd/manifold.hpp"
#include "support.hpp"

using namespace sasd;
using namespace sasd::test;

namespace {

Vec random_tangent(std::mt19937_64& rng, const Vec& a, double length) {
  Vec z = uniform_vec(rng, a.size());
  const double c = inner(a, z);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= c * a[i];
  const double n = l2(z);
  for (double& x : z) x *= length / n;
  return z;
}

}  // namespace

TEST(TangentProject, OrthogonalAndIdempotent) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec a = unit_vec(rng, 30);
    const Vec z = uniform_vec(rng, 30, -5, 5);
    const Vec p = tangent_project(a, z);
    EXPECT_NEAR(inner(a, p), 0.0, 1e-13);
    EXPECT_LT(rel_err(tangent_project(a, p), p), 1e-13);
  }
}

TEST(TangentProject, NearlyRadialInputStaysTangent) {
  std::mt19937_64 rng(2);
  const Vec a = unit_vec(rng, 40);
  Vec z = a;
  const Vec t = random_tangent(rng, a, 1e-7);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 3.0 * a[i] + t[i];
  const Vec p = tangent_project(a, z);
  EXPECT_LT(std::abs(inner(a, p)), 1e-12 * l2(p));
}

TEST(TangentProject, OffSphereBaseThrows) {
  EXPECT_THROW(tangent_project(Vec{1.0, 1.0}, Vec{1.0, 0.0}), ContractError);
  EXPECT_THROW(tangent_project(Vec{1.0, 0.0}, Vec{1.0, 0.0, 0.0}), DimensionError);
}

TEST(Retraction, KeepsUnitNorm) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec a = unit_vec(rng, 25);
    const double len = 10.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Vec b = retract_exp(a, random_tangent(rng, a, len));
    EXPECT_NEAR(l2(b), 1.0, 1e-12);
  }
}

TEST(Retraction, ZeroStepReturnsBase) {
  const Vec a{0.6, 0.8};
  EXPECT_EQ(retract_exp(a, Vec{0.0, 0.0}), a);
}

TEST(Retraction, GreatCircleByHand) {
  // Quarter turn from e1 towards e2.
  const Vec b = retract_exp(Vec{1.0, 0.0, 0.0}, Vec{0.0, M_PI / 2, 0.0});
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
}

TEST(Retraction, IncrementMatchesDifference) {
  std::mt19937_64 rng(4);
  for (double len : {1e-9, 1e-4, 0.3, 2.0}) {
    const Vec a = unit_vec(rng, 12);
    const Vec d = random_tangent(rng, a, len);
    const Vec b = retract_exp(a, d);
    Vec diff(12);
    for (int i = 0; i < 12; ++i) diff[i] = b[i] - a[i];
    const Vec inc = retract_exp_increment(a, d);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(inc[i], diff[i], 1e-15);
  }
}

TEST(RetractInverse, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec a = unit_vec(rng, 20);
    const double len = 3.0 * std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const Vec d = random_tangent(rng, a, len);
    const Vec back = retract_inverse(a, retract_exp(a, d));
    EXPECT_LT(rel_err(back, d), 1e-10) << "length " << len;
  }
}

TEST(RetractInverse, LengthIsGeodesicDistance) {
  std::mt19937_64 rng(6);
  const Vec a = unit_vec(rng, 8), b = unit_vec(rng, 8);
  EXPECT_NEAR(l2(retract_inverse(a, b)), std::acos(inner(a, b)), 1e-12);
  EXPECT_NEAR(l2(retract_inverse(a, a)), 0.0, 1e-15);
}

TEST(RetractInverse, AntipodalThrows) {
  const Vec a{0.0, 1.0, 0.0};
  EXPECT_THROW(retract_inverse(a, Vec{0.0, -1.0, 0.0}), SingularityError);
}

TEST(Normalize, ZeroThrows) {
  EXPECT_THROW(normalize(Vec{0.0, 0.0}), DomainError);
  const Vec u = normalize(Vec{3.0, 4.0});
  EXPECT_DOUBLE_EQ(u[0], 0.6);
  EXPECT_DOUBLE_EQ(u[1], 0.8);
}

TEST(Oblique, ColumnwiseAndErrorsNameTheColumn) {
  std::mt19937_64 rng(7);
  const ObliquePoint A{unit_vec(rng, 6), unit_vec(rng, 6)};
  const std::vector<Vec> D{random_tangent(rng, A[0], 0.5), random_tangent(rng, A[1], 1.5)};
  const ObliquePoint B = oblique_retract_exp(A, D);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(B[k], retract_exp(A[k], D[k]));
    EXPECT_NEAR(l2(B[k]), 1.0, 1e-12);
  }
  const auto back = oblique_retract_inverse(A, B);
  EXPECT_LT(rel_err(back[1], D[1]), 1e-10);
  const auto P = oblique_tangent_project(A, {Vec(6, 1.0), Vec(6, 1.0)});
  EXPECT_NEAR(inner(P[1], A[1]), 0.0, 1e-13);

  ObliquePoint bad = A;
  for (double& x : bad[1]) x = -x;
  try {
    oblique_retract_inverse(A, bad);
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
}
