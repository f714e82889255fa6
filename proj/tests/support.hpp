#pragma once

// Helpers shared by the test binaries. The oracles here are written from the
// definitions and deliberately share no code with the library.

#include <cmath>
#include <random>
#include <vector>

#include "sasd/types.hpp"

namespace sasd::test {

inline Vec uniform_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline Vec unit_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Vec v(n);
  double s = 0.0;
  for (double& x : v) {
    x = g(rng);
    s += x * x;
  }
  for (double& x : v) x /= std::sqrt(s);
  return v;
}

inline double l2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_err(const Vec& a, const Vec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

inline double inner(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline long mod(long i, long n) { return ((i % n) + n) % n; }

// (u ⊛ v)[i] = Σ_j v[j] u[i − j], v zero beyond its length.
inline Vec oracle_cconv(const Vec& u, const Vec& v) {
  const long m = static_cast<long>(u.size());
  Vec out(u.size(), 0.0);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < static_cast<long>(v.size()); ++j) out[i] += v[j] * u[mod(i - j, m)];
  }
  return out;
}

// Adjoint of x ↦ x ⊛ v: out[j] = Σ_i v[i] u[j + i].
inline Vec oracle_ccorr(const Vec& v, const Vec& u) {
  const long m = static_cast<long>(u.size());
  Vec out(u.size(), 0.0);
  for (long j = 0; j < m; ++j) {
    for (long i = 0; i < static_cast<long>(v.size()); ++i) out[j] += v[i] * u[mod(j + i, m)];
  }
  return out;
}

// 2D grids stored row-major with `cols` columns.
inline Vec oracle_cconv2d(const Vec& u, std::size_t m1, std::size_t m2, const Vec& v,
                          std::size_t n1, std::size_t n2) {
  Vec out(m1 * m2, 0.0);
  for (long i = 0; i < static_cast<long>(m1); ++i) {
    for (long j = 0; j < static_cast<long>(m2); ++j) {
      double s = 0.0;
      for (long p = 0; p < static_cast<long>(n1); ++p) {
        for (long q = 0; q < static_cast<long>(n2); ++q) {
          s += v[p * n2 + q] * u[mod(i - p, m1) * m2 + mod(j - q, m2)];
        }
      }
      out[i * m2 + j] = s;
    }
  }
  return out;
}

}  // namespace sasd::test
