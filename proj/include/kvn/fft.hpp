#pragma once

#include <cstddef>

#include "kvn/aligned.hpp"

namespace kvn {

enum class Axis { R, P };

/*
 * In-place batched 1-D FFTs over a row-major rows x cols buffer.
 * Axis::P transforms each row (contiguous), Axis::R each column.
 * forward uses e^{-i k x}; neither direction is scaled.
 * Plans are made with FFTW_ESTIMATE and executed on any 64-byte aligned
 * buffer of the same shape.
 */
class AxisFft {
 public:
  AxisFft(std::size_t rows, std::size_t cols, Axis axis);
  ~AxisFft();
  AxisFft(const AxisFft&) = delete;
  AxisFft& operator=(const AxisFft&) = delete;
  AxisFft(AxisFft&& other) noexcept;
  AxisFft& operator=(AxisFft&& other) noexcept;

  void forward(complex* data) const;
  void backward(complex* data) const;

  std::size_t length() const { return length_; }

 private:
  void release();

  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  std::size_t length_ = 0;
};

const char* fftw_version_string();

}  // namespace kvn
