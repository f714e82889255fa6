#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "sasd/continuation.hpp"
#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/pipeline.hpp"
#include "sasd/synth.hpp"
#include "support.hpp"

using namespace sasd;
using namespace sasd::test;

namespace {

struct Fixture {
  Instance inst;
  Problem p;
  BilinearState init;
};

Fixture fixture(std::uint64_t seed, bool bias = false) {
  Fixture f;
  f.inst = make_instance({KernelKind::kUniformSphere, 12},
                         {ActivationKind::kBernoulliRademacher, 600, 0.06},
                         {0.0, bias ? 0.7 : 0.0}, seed);
  f.p = make_problem(f.inst.y, 34, 1, bias);
  f.init = initial_state(f.p, {init_kernel(f.inst.y, 12, seed)});
  return f;
}

}  // namespace

TEST(StageCount, Formula) {
  EXPECT_EQ(stage_count(1.0, 0.5, 0.9), 6);   // 0.9^6 = 0.531, 0.9^7 = 0.478
  EXPECT_EQ(stage_count(1.0, 1.0, 0.9), 0);
  EXPECT_EQ(stage_count(1.0, 0.1, 0.5), 3);
  EXPECT_THROW(stage_count(1.0, 0.1, 1.0), DomainError);
  EXPECT_THROW(stage_count(0.0, 0.1, 0.5), DomainError);
}

TEST(DefaultLambda0, FirstProxStepStaysAtZero) {
  for (bool bias : {false, true}) {
    const Fixture f = fixture(1, bias);
    const double l0 = default_lambda0(f.p, f.init);
    // Independent: ‖aᵀ(y − b)‖∞ by direct correlation sums.
    Vec yb = f.p.y;
    for (double& v : yb) v -= f.init.bias;
    double want = 0.0;
    for (double v : oracle_ccorr(f.init.kernels[0], yb)) want = std::max(want, std::abs(v));
    EXPECT_NEAR(l0, want, 1e-10 * want);
    const PenaltyConfig at{l0 * (1 + 1e-9), {}, false};
    const XStep step = backtrack_x(f.p, f.init, at, 0.99);
    for (double v : step.maps[0]) EXPECT_EQ(v, 0.0);
    const PenaltyConfig below{0.9 * l0, {}, false};
    const XStep moved = backtrack_x(f.p, f.init, below, 0.99);
    EXPECT_GT(norm_inf(moved.maps[0]), 0.0);
  }
}

TEST(WeightUpdate, MatchesFormula) {
  std::mt19937_64 rng(2);
  const std::size_t m = 500, n = 34;
  const Vec x = uniform_vec(rng, m, -2, 2);
  const Weights w = weight_update(x, n);
  const std::size_t i0 = static_cast<std::size_t>(std::ceil(n / std::log(double(m) / n)));
  Vec mag(m);
  for (std::size_t i = 0; i < m; ++i) mag[i] = std::abs(x[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());
  EXPECT_EQ(w.eps, std::max(mag[i0 - 1], 1e-3));
  for (std::size_t i = 0; i < m; ++i) EXPECT_DOUBLE_EQ(w.w[i], 1.0 / (std::abs(x[i]) + w.eps));
}

TEST(WeightUpdate, FloorAndClamp) {
  const Weights w = weight_update(Vec(100, 0.0), 10);
  EXPECT_EQ(w.eps, 1e-3);
  for (double v : w.w) EXPECT_DOUBLE_EQ(v, 1e3);
  // m ≤ n clamps i0 to m: ε is the smallest magnitude.
  const Weights small = weight_update(Vec{0.5, -2.0, 1.0}, 5);
  EXPECT_EQ(small.eps, 0.5);
}

TEST(Homotopy, StagesDecreaseGeometricallyThenFinal) {
  const Fixture f = fixture(3);
  HomotopySchedule sch;
  sch.lambda_star = 0.02;
  SolverConfig cfg;
  StopRule stop;
  stop.max_iters = 500;
  const ContinuationResult r = homotopy_solve(f.p, f.init, sch, SolverKind::kIadm, cfg, stop);
  const double l0 = default_lambda0(f.p, f.init);
  EXPECT_DOUBLE_EQ(r.lambda0, l0);
  const int K = stage_count(l0, 0.02, 0.9);
  ASSERT_EQ(r.stages.size(), static_cast<std::size_t>(K + 2));
  for (int k = 0; k <= K; ++k) {
    EXPECT_NEAR(r.stages[k].lambda, l0 * std::pow(0.9, k), 1e-12 * l0);
    EXPECT_NEAR(r.stages[k].tolerance, 0.1 * r.stages[k].lambda, 1e-15);
  }
  EXPECT_EQ(r.stages.back().lambda, 0.02);
  EXPECT_EQ(r.stages.back().tolerance, 1e-6);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].iteration, r.trace[i - 1].iteration + 1);
    EXPECT_GE(r.trace[i].fft_ops, r.trace[i - 1].fft_ops);
  }
}

TEST(Homotopy, StartAtTargetRunsOnlyFinalStage) {
  const Fixture f = fixture(4);
  HomotopySchedule sch;
  sch.lambda_star = 0.05;
  sch.lambda0 = 0.05;
  StopRule stop;
  stop.max_iters = 50;
  const ContinuationResult r = homotopy_solve(f.p, f.init, sch, SolverKind::kAdm, {}, stop);
  ASSERT_EQ(r.stages.size(), 1u);
  EXPECT_EQ(r.stages[0].lambda, 0.05);
}

TEST(Homotopy, BudgetCoversWholePath) {
  const Fixture f = fixture(5);
  HomotopySchedule sch;
  sch.lambda_star = 1e-3;
  StopRule stop;
  stop.max_iters = 100000;
  stop.max_fft_ops = 2000;
  const ContinuationResult r = homotopy_solve(f.p, f.init, sch, SolverKind::kIadm, {}, stop);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_GE(r.trace.back().fft_ops, 2000u);
  EXPECT_LT(r.trace[r.trace.size() - 2].fft_ops, 2000u);
}

TEST(Homotopy, ValidatesSchedule) {
  const Fixture f = fixture(6);
  HomotopySchedule sch;
  sch.lambda_star = 0.1;
  sch.lambda0 = 0.05;
  EXPECT_THROW(homotopy_solve(f.p, f.init, sch, SolverKind::kIadm, {}, {}), DomainError);
  sch.lambda0 = 0.0;
  sch.eta = 1.0;
  EXPECT_THROW(homotopy_solve(f.p, f.init, sch, SolverKind::kIadm, {}, {}), DomainError);
}

TEST(Reweight, OneRoundEqualsPlainSolve) {
  const Fixture f = fixture(7);
  SolverConfig cfg;
  cfg.penalty.lambda = 0.05;
  StopRule stop;
  stop.max_iters = 80;
  const ContinuationResult r = reweight_solve(f.p, f.init, SolverKind::kIadm, cfg, stop, 1);
  const SolveResult s = iadm_solve(f.p, f.init, cfg, stop);
  EXPECT_EQ(r.state.maps, s.state.maps);
  EXPECT_EQ(r.state.kernels, s.state.kernels);
}

TEST(Reweight, LaterRoundsShrinkSmallEntries) {
  const Fixture f = fixture(8);
  SolverConfig cfg;
  cfg.penalty.lambda = 0.05;
  StopRule stop;
  stop.max_iters = 300;
  const ContinuationResult one = reweight_solve(f.p, f.init, SolverKind::kIadm, cfg, stop, 1);
  const ContinuationResult three = reweight_solve(f.p, f.init, SolverKind::kIadm, cfg, stop, 3);
  EXPECT_GE(three.stages.size(), 2u);
  auto nnz = [](const Vec& x) { return std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }); };
  EXPECT_LE(nnz(three.state.maps[0]), nnz(one.state.maps[0]));
  EXPECT_THROW(reweight_solve(f.p, f.init, SolverKind::kIadm, cfg, stop, 0), DomainError);
}
