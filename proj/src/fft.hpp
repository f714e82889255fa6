#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sasd/types.hpp"

namespace sasd::detail {

using Spectrum = std::vector<std::complex<double>>;

// Real-to-half-complex transform of a fixed shape. Plans are cached per thread;
// planning itself is serialized because the FFTW planner is not reentrant.
class RealFft {
 public:
  static RealFft& for_shape(Extent shape);

  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t spectrum_size() const noexcept { return spectrum_size_; }

  void forward(std::span<const double> in, Spectrum& out);
  /// Normalized inverse: inverse(forward(x)) == x.
  void inverse(const Spectrum& in, Vec& out);

 private:
  explicit RealFft(Extent shape);

  Extent shape_;
  std::size_t spectrum_size_;
  double* real_buf_;
  void* complex_buf_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace sasd::detail
