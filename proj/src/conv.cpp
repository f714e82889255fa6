#include "sasd/conv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "sasd/errors.hpp"

namespace sasd {

namespace {

thread_local std::uint64_t g_transforms = 0;

std::string shape_str(Extent e) {
  return std::to_string(e.rows) + "x" + std::to_string(e.cols);
}

void require_fits(Extent kernel, Extent signal, const char* op) {
  if (!kernel.fits_in(signal) || signal.size() == 0) {
    throw DimensionError(std::string(op) + ": kernel " + shape_str(kernel) +
                         " does not fit in signal " + shape_str(signal));
  }
}

void require_size(Extent e, std::span<const double> v, const char* op) {
  if (v.size() != e.size()) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(e.size()) +
                         " values for shape " + shape_str(e) + ", got " +
                         std::to_string(v.size()));
  }
}

long wrap(long i, long m) {
  long r = i % m;
  return r < 0 ? r + m : r;
}

// conj_kernel selects correlation (kernel spectrum conjugated).
Vec spectral_product(Extent signal, std::span<const double> u, Extent kernel,
                     std::span<const double> v, bool conj_kernel) {
  auto& fft = detail::RealFft::for_shape(signal);
  thread_local detail::Spectrum su, sv;
  thread_local Vec padded;
  padded = zero_pad(kernel, v, signal);
  fft.forward(u, su);
  fft.forward(padded, sv);
  for (std::size_t i = 0; i < su.size(); ++i) {
    su[i] *= conj_kernel ? std::conj(sv[i]) : sv[i];
  }
  Vec out;
  fft.inverse(su, out);
  g_transforms += 3;
  return out;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

std::uint64_t fft_transform_count() noexcept { return g_transforms; }

// Shape-generic ------------------------------------------------------------

Vec zero_pad(Extent from, std::span<const double> v, Extent to) {
  require_fits(from, to, "zero_pad");
  require_size(from, v, "zero_pad");
  Vec out(to.size(), 0.0);
  for (std::size_t i = 0; i < from.rows; ++i) {
    std::copy_n(v.begin() + i * from.cols, from.cols, out.begin() + i * to.cols);
  }
  return out;
}

Vec restrict_to(Extent from, std::span<const double> u, Extent to) {
  require_fits(to, from, "restrict");
  require_size(from, u, "restrict");
  Vec out(to.size());
  for (std::size_t i = 0; i < to.rows; ++i) {
    std::copy_n(u.begin() + i * from.cols, to.cols, out.begin() + i * to.cols);
  }
  return out;
}

Vec shift_cyclic(Extent shape, std::span<const double> v, long dr, long dc) {
  require_size(shape, v, "shift_cyclic");
  const long rows = static_cast<long>(shape.rows);
  const long cols = static_cast<long>(shape.cols);
  Vec out(v.size());
  if (v.empty()) return out;
  const long r0 = wrap(dr, rows);
  const long c0 = wrap(dc, cols);
  for (long i = 0; i < rows; ++i) {
    const long src_i = wrap(i - r0, rows);
    for (long j = 0; j < cols; ++j) {
      out[i * cols + j] = v[src_i * cols + wrap(j - c0, cols)];
    }
  }
  return out;
}

Vec cconv(Extent signal, std::span<const double> u, Extent kernel, std::span<const double> v) {
  require_fits(kernel, signal, "cconv");
  require_size(signal, u, "cconv");
  require_size(kernel, v, "cconv");
  return spectral_product(signal, u, kernel, v, false);
}

Vec ccorr(Extent kernel, std::span<const double> v, Extent signal, std::span<const double> u) {
  require_fits(kernel, signal, "ccorr");
  require_size(signal, u, "ccorr");
  require_size(kernel, v, "ccorr");
  return spectral_product(signal, u, kernel, v, true);
}

double max_power_spectrum(Extent signal, Extent kernel, std::span<const Vec> kernels) {
  require_fits(kernel, signal, "max_power_spectrum");
  auto& fft = detail::RealFft::for_shape(signal);
  Vec power(fft.spectrum_size(), 0.0);
  detail::Spectrum spec;
  for (const auto& a : kernels) {
    fft.forward(zero_pad(kernel, a, signal), spec);
    g_transforms += 1;
    for (std::size_t i = 0; i < spec.size(); ++i) power[i] += std::norm(spec[i]);
  }
  return *std::max_element(power.begin(), power.end());
}

// 1D ------------------------------------------------------------------------

Vec cconv(std::span<const double> u, std::span<const double> v) {
  return cconv(Extent{u.size()}, u, Extent{v.size()}, v);
}

Vec ccorr(std::span<const double> v, std::span<const double> u) {
  return ccorr(Extent{v.size()}, v, Extent{u.size()}, u);
}

Vec shift_cyclic(std::span<const double> v, long shift) {
  return shift_cyclic(Extent{v.size()}, v, shift, 0);
}

Vec zero_pad(std::span<const double> v, std::size_t m) {
  return zero_pad(Extent{v.size()}, v, Extent{m});
}

Vec restrict_to(std::span<const double> u, std::size_t n) {
  return restrict_to(Extent{u.size()}, u, Extent{n});
}

Vec naive_cconv(std::span<const double> u, std::span<const double> v) {
  const std::size_t m = u.size();
  require_fits(Extent{v.size()}, Extent{m}, "naive_cconv");
  Vec out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * u[(i + m - j) % m];
    out[i] = s;
  }
  return out;
}

Vec naive_ccorr(std::span<const double> v, std::span<const double> u) {
  const std::size_t m = u.size();
  require_fits(Extent{v.size()}, Extent{m}, "naive_ccorr");
  Vec out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * u[(i + j) % m];
    out[i] = s;
  }
  return out;
}

// 2D ------------------------------------------------------------------------

Image cconv2d(const Image& u, const Image& v) {
  return Image(u.shape, cconv(u.shape, u.values, v.shape, v.values));
}

Image ccorr2d(const Image& v, const Image& u) {
  return Image(u.shape, ccorr(v.shape, v.values, u.shape, u.values));
}

Image flip2d(const Image& z) {
  Image out(z.shape.rows, z.shape.cols);
  for (std::size_t i = 0; i < z.shape.rows; ++i) {
    for (std::size_t j = 0; j < z.shape.cols; ++j) {
      out(i, j) = z(z.shape.rows - 1 - i, z.shape.cols - 1 - j);
    }
  }
  return out;
}

Image zero_pad2d(const Image& v, Extent target) {
  return Image(target, zero_pad(v.shape, v.values, target));
}

Image restrict2d(const Image& u, Extent target) {
  return Image(target, restrict_to(u.shape, u.values, target));
}

Image naive_cconv2d(const Image& u, const Image& v) {
  require_fits(v.shape, u.shape, "naive_cconv2d");
  const std::size_t m1 = u.shape.rows, m2 = u.shape.cols;
  Image out(m1, m2);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t j = 0; j < m2; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < v.shape.rows; ++p) {
        for (std::size_t q = 0; q < v.shape.cols; ++q) {
          s += v(p, q) * u((i + m1 - p) % m1, (j + m2 - q) % m2);
        }
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace sasd
