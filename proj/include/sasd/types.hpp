#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sasd {

using Vec = std::vector<double>;

/// Shape of a 1D signal (cols == 1) or a row-major 2D grid.
struct Extent {
  std::size_t rows = 0;
  std::size_t cols = 1;

  constexpr std::size_t size() const noexcept { return rows * cols; }
  constexpr bool is_1d() const noexcept { return cols == 1; }
  constexpr bool fits_in(const Extent& outer) const noexcept {
    return rows <= outer.rows && cols <= outer.cols;
  }
  friend constexpr bool operator==(const Extent&, const Extent&) = default;
};

/// Real 2D array stored row-major.
struct Image {
  Extent shape;
  Vec values;

  Image() = default;
  Image(std::size_t rows, std::size_t cols) : shape{rows, cols}, values(rows * cols, 0.0) {}
  Image(Extent e, Vec v) : shape(e), values(std::move(v)) {}

  double& operator()(std::size_t i, std::size_t j) { return values[i * shape.cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * shape.cols + j]; }
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
double norm1(std::span<const double> a);

}  // namespace sasd
