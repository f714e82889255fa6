#include "sasd/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/manifold.hpp"
#include "sasd/rng.hpp"

namespace sasd {

namespace {

constexpr int kInitAttempts = 10;

long wrap(long i, long n) {
  const long r = i % n;
  return r < 0 ? r + n : r;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

Vec init_kernel(std::span<const double> y, std::size_t n0, std::uint64_t seed) {
  const std::size_t m = y.size();
  if (n0 < 1) throw DomainError("init_kernel: n0 must be >= 1");
  if (m < n0) throw DimensionError("init_kernel: signal shorter than n0");
  const std::size_t n = 3 * n0 - 2;
  auto rng = make_rng(seed, Stream::kInit);
  std::uniform_int_distribution<std::size_t> start(0, m - n0);
  for (int attempt = 0; attempt < kInitAttempts; ++attempt) {
    const std::size_t i = start(rng);
    Vec a(n, 0.0);
    std::copy(y.begin() + static_cast<long>(i), y.begin() + static_cast<long>(i + n0),
              a.begin() + static_cast<long>(n0 - 1));
    if (norm2(a) > 0.0) return normalize(a);
  }
  throw DomainError("init_kernel: every sampled window of y was zero");
}

ObliquePoint init_multi(std::span<const double> y, std::size_t n0, std::size_t num_kernels,
                        std::uint64_t seed) {
  if (num_kernels < 1) throw DomainError("init_multi: need at least one kernel");
  ObliquePoint out;
  out.reserve(num_kernels);
  out.push_back(init_kernel(y, n0, seed));
  for (std::size_t k = 1; k < num_kernels; ++k) {
    out.push_back(init_kernel(y, n0, derive_seed(seed, Stream::kInit, k)));
  }
  return out;
}

Vec init_kernel_2d(const Image& y, Extent n0, std::uint64_t seed) {
  const Extent m = y.shape;
  if (n0.size() == 0) throw DomainError("init_kernel_2d: empty window");
  if (!n0.fits_in(m)) throw DimensionError("init_kernel_2d: window larger than the image");
  const Extent n{3 * n0.rows - 2, 3 * n0.cols - 2};
  auto rng = make_rng(seed, Stream::kInit);
  std::uniform_int_distribution<std::size_t> row(0, m.rows - n0.rows);
  std::uniform_int_distribution<std::size_t> col(0, m.cols - n0.cols);
  for (int attempt = 0; attempt < kInitAttempts; ++attempt) {
    const std::size_t r0 = row(rng);
    const std::size_t c0 = col(rng);
    Vec a(n.size(), 0.0);
    for (std::size_t i = 0; i < n0.rows; ++i) {
      for (std::size_t j = 0; j < n0.cols; ++j) {
        a[(i + n0.rows - 1) * n.cols + (j + n0.cols - 1)] = y(r0 + i, c0 + j);
      }
    }
    if (norm2(a) > 0.0) return normalize(a);
  }
  throw DomainError("init_kernel_2d: every sampled window of y was zero");
}

Vec random_kernel(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("random_kernel: n must be >= 1");
  auto rng = make_rng(seed, Stream::kInit, 0x72616e64);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec a(n);
  do {
    for (double& v : a) v = gauss(rng);
  } while (norm2(a) == 0.0);
  return normalize(a);
}

BilinearState initial_state(const Problem& problem, ObliquePoint kernels) {
  problem.validate();
  BilinearState s;
  s.kernels = std::move(kernels);
  s.maps.assign(problem.num_kernels, Vec(problem.signal.size(), 0.0));
  s.bias = problem.fit_bias ? mean(problem.y) : 0.0;
  validate_state(problem, s);
  return s;
}

ShiftCorrection2d shift_correct(Extent signal, std::span<const double> y, Extent kernel,
                                std::span<const double> a, std::span<const double> x,
                                Extent window, double bias, ShiftSelect select) {
  if (y.size() != signal.size() || x.size() != signal.size() || a.size() != kernel.size()) {
    throw DimensionError("shift_correct: shape mismatch");
  }
  if (window.size() == 0 || !window.fits_in(kernel) || !kernel.fits_in(signal)) {
    throw DimensionError("shift_correct: window must fit in the kernel and the kernel in the signal");
  }
  const long row_span = 2 * static_cast<long>(window.rows);
  const long col_span = kernel.is_1d() ? 0 : 2 * static_cast<long>(window.cols);

  ShiftCorrection2d best;
  double best_score = std::numeric_limits<double>::infinity();
  for (long dr = 0; dr <= row_span; ++dr) {
    for (long dc = 0; dc <= col_span; ++dc) {
      const Vec shifted = shift_cyclic(kernel, a, -dr, -dc);
      Vec k_hat = restrict_to(kernel, shifted, window);
      double score;
      Vec x_hat;
      double err = 0.0;
      if (select == ShiftSelect::kMaxEnergy) {
        score = -dot(k_hat, k_hat);
      } else {
        x_hat = shift_cyclic(signal, x, dr, dc);
        Vec r = cconv(signal, x_hat, window, k_hat);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += bias - y[i];
        err = norm2(r);
        score = err;
      }
      if (score < best_score) {
        best_score = score;
        best.kernel = std::move(k_hat);
        best.map = std::move(x_hat);
        best.row_offset = dr;
        best.col_offset = dc;
        best.error = err;
      }
    }
  }
  if (select == ShiftSelect::kMaxEnergy) {
    best.map = shift_cyclic(signal, x, best.row_offset, best.col_offset);
    Vec r = cconv(signal, best.map, window, best.kernel);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += bias - y[i];
    best.error = norm2(r);
  }
  return best;
}

ShiftCorrection shift_correct(std::span<const double> y, std::span<const double> a,
                              std::span<const double> x, std::size_t n0, double bias,
                              ShiftSelect select) {
  if (n0 < 1) throw DomainError("shift_correct: n0 must be >= 1");
  ShiftCorrection2d g = shift_correct(Extent{y.size()}, y, Extent{a.size()}, a, x, Extent{n0},
                                      bias, select);
  ShiftCorrection out;
  out.kernel = std::move(g.kernel);
  out.map = std::move(g.map);
  out.offset = g.row_offset;
  out.kernel_shift = -g.row_offset;
  out.error = g.error;
  return out;
}

Vec align_map(std::span<const double> x, long kernel_shift) {
  return shift_cyclic(x, -kernel_shift);
}

RecoveryMatch recovery_match(Extent window, std::span<const double> a0, Extent kernel,
                             std::span<const double> a_est) {
  if (a0.size() != window.size() || a_est.size() != kernel.size()) {
    throw DimensionError("recovery_error: shape mismatch");
  }
  if (!window.fits_in(kernel)) throw DimensionError("recovery_error: truth longer than estimate");
  const Vec u = normalize(a0);
  const Vec v = normalize(a_est);
  const long kr = static_cast<long>(kernel.rows), kc = static_cast<long>(kernel.cols);
  const long wr = static_cast<long>(window.rows), wc = static_cast<long>(window.cols);
  const long row_offsets = 2 * wr;
  const long col_offsets = kernel.is_1d() ? 1 : 2 * wc;
  RecoveryMatch best;
  best.error = 1.0;
  for (long o1 = 0; o1 < row_offsets; ++o1) {
    for (long o2 = 0; o2 < col_offsets; ++o2) {
      double c = 0.0;
      for (long i = 0; i < wr; ++i) {
        for (long j = 0; j < wc; ++j) {
          c += u[i * wc + j] * v[wrap(i + o1, kr) * kc + wrap(j + o2, kc)];
        }
      }
      if (1.0 - std::abs(c) < best.error) {
        best.error = 1.0 - std::abs(c);
        best.row_offset = o1;
        best.col_offset = o2;
      }
    }
  }
  best.error = std::max(best.error, 0.0);
  return best;
}

double recovery_error(Extent window, std::span<const double> a0, Extent kernel,
                      std::span<const double> a_est) {
  return recovery_match(window, a0, kernel, a_est).error;
}

double recovery_error(std::span<const double> a0, std::span<const double> a_est) {
  return recovery_error(Extent{a0.size()}, a0, Extent{a_est.size()}, a_est);
}

SupportScore support_f1(std::span<const double> x0, std::span<const double> x, double threshold,
                        long tolerance) {
  if (x0.size() != x.size()) throw DimensionError("support_f1: length mismatch");
  const long m = static_cast<long>(x.size());
  std::vector<char> detected(x.size()), used(x.size(), 0);
  long n_detected = 0, n_true = 0, hits = 0;
  for (long i = 0; i < m; ++i) {
    detected[i] = std::abs(x[i]) > threshold;
    n_detected += detected[i];
  }
  for (long i = 0; i < m; ++i) {
    if (x0[i] == 0.0) continue;
    ++n_true;
    // Nearest unused detection first: 0, −1, +1, −2, +2, ...
    for (long d = 0; d <= tolerance; ++d) {
      bool matched = false;
      for (long s : {-d, d}) {
        const long j = wrap(i + s, m);
        if (detected[j] && !used[j]) {
          used[j] = 1;
          ++hits;
          matched = true;
          break;
        }
      }
      if (matched) break;
    }
  }
  SupportScore out;
  out.precision = n_detected > 0 ? static_cast<double>(hits) / n_detected : (n_true == 0 ? 1.0 : 0.0);
  out.recall = n_true > 0 ? static_cast<double>(hits) / n_true : 1.0;
  const double pr = out.precision + out.recall;
  out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

}  // namespace sasd
