#pragma once

// Cyclic convolution and correlation on 1D signals and 2D grids.
//
// Kernels shorter than the signal are zero-padded to the signal length
// (top-left corner in 2D) before the length-m transform. Every convolution or
// correlation call costs exactly three transforms (two forward, one inverse)
// and is charged to a per-thread counter, see fft_transform_count().

#include <cstdint>
#include <span>

#include "sasd/types.hpp"

namespace sasd {

// 1D ------------------------------------------------------------------------

/// u ⊛ v with v zero-padded to |u|. Throws DimensionError if |v| > |u|.
Vec cconv(std::span<const double> u, std::span<const double> v);

/// Adjoint of w ↦ cconv(w, v): the cyclic reversal of padded v convolved with u.
Vec ccorr(std::span<const double> v, std::span<const double> u);

/// out[i] = v[(i - shift) mod m].
Vec shift_cyclic(std::span<const double> v, long shift);

Vec zero_pad(std::span<const double> v, std::size_t m);
/// First n coordinates; adjoint of zero_pad.
Vec restrict_to(std::span<const double> u, std::size_t n);

/// Direct O(mn) summation of the cyclic-convolution definition.
Vec naive_cconv(std::span<const double> u, std::span<const double> v);
Vec naive_ccorr(std::span<const double> v, std::span<const double> u);

// 2D ------------------------------------------------------------------------

Image cconv2d(const Image& u, const Image& v);
Image ccorr2d(const Image& v, const Image& u);
/// Z~(i, j) = Z(m1 - i - 1, m2 - j - 1) (0-based).
Image flip2d(const Image& z);
Image zero_pad2d(const Image& v, Extent target);
Image restrict2d(const Image& u, Extent target);
Image naive_cconv2d(const Image& u, const Image& v);

// Shape-generic forms used by the solvers. A 1D signal is an Extent with
// cols == 1; 2D data is row-major.

Vec cconv(Extent signal, std::span<const double> u, Extent kernel, std::span<const double> v);
Vec ccorr(Extent kernel, std::span<const double> v, Extent signal, std::span<const double> u);
Vec zero_pad(Extent from, std::span<const double> v, Extent to);
Vec restrict_to(Extent from, std::span<const double> u, Extent to);
/// Cyclic shift by (dr, dc) on a grid: out(i, j) = v(i - dr, j - dc).
Vec shift_cyclic(Extent shape, std::span<const double> v, long dr, long dc);

/// max over frequencies of sum_k |FFT(pad(kernel_k))|^2, the Lipschitz
/// constant of the x-gradient of 0.5 * ||sum_k a_k ⊛ x_k - y||^2.
/// One forward transform per kernel.
double max_power_spectrum(Extent signal, Extent kernel, std::span<const Vec> kernels);

/// Number of real transforms executed on the calling thread so far.
std::uint64_t fft_transform_count() noexcept;

}  // namespace sasd
