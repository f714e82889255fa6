#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace sasd::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft& RealFft::for_shape(Extent shape) {
  thread_local std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<RealFft>> cache;
  auto key = std::make_pair(shape.rows, shape.cols);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<RealFft>(new RealFft(shape))).first;
  }
  return *it->second;
}

RealFft::RealFft(Extent shape) : shape_(shape) {
  const int rows = static_cast<int>(shape.rows);
  const int cols = static_cast<int>(shape.cols);
  spectrum_size_ = shape.is_1d() ? shape.rows / 2 + 1 : shape.rows * (shape.cols / 2 + 1);

  std::lock_guard<std::mutex> lock(planner_mutex());
  real_buf_ = fftw_alloc_real(shape.size());
  auto* cbuf = fftw_alloc_complex(spectrum_size_);
  complex_buf_ = cbuf;
  if (shape.is_1d()) {
    forward_plan_ = fftw_plan_dft_r2c_1d(rows, real_buf_, cbuf, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_1d(rows, cbuf, real_buf_, FFTW_ESTIMATE);
  } else {
    forward_plan_ = fftw_plan_dft_r2c_2d(rows, cols, real_buf_, cbuf, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(rows, cols, cbuf, real_buf_, FFTW_ESTIMATE);
  }
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

void RealFft::forward(std::span<const double> in, Spectrum& out) {
  std::copy(in.begin(), in.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  out.resize(spectrum_size_);
  auto* c = static_cast<fftw_complex*>(complex_buf_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) out[i] = {c[i][0], c[i][1]};
}

void RealFft::inverse(const Spectrum& in, Vec& out) {
  auto* c = static_cast<fftw_complex*>(complex_buf_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) {
    c[i][0] = in[i].real();
    c[i][1] = in[i].imag();
  }
  // c2r destroys its input; the buffer is refilled on every call.
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  const double scale = 1.0 / static_cast<double>(shape_.size());
  out.resize(shape_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_buf_[i] * scale;
}

}  // namespace sasd::detail
