#include "kvn/fft.hpp"

#include <fftw3.h>
#include <omp.h>

#include <mutex>
#include <utility>

namespace kvn {

namespace {

/* the FFTW planner is not reentrant */
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
}

fftw_plan make_plan(std::size_t rows, std::size_t cols, Axis axis, int sign, fftw_complex* buf) {
  int n, howmany, stride, dist;
  if (axis == Axis::P) {
    n = static_cast<int>(cols);
    howmany = static_cast<int>(rows);
    stride = 1;
    dist = static_cast<int>(cols);
  } else {
    n = static_cast<int>(rows);
    howmany = static_cast<int>(cols);
    stride = static_cast<int>(cols);
    dist = 1;
  }
  return fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr, stride, dist,
                            sign, FFTW_ESTIMATE);
}

}  // namespace

AxisFft::AxisFft(std::size_t rows, std::size_t cols, Axis axis)
    : length_(axis == Axis::P ? cols : rows) {
  init_threads_once();
  ComplexBuffer scratch(rows * cols);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_plan_with_nthreads(rows * cols >= (1u << 14) ? omp_get_max_threads() : 1);
  fwd_ = make_plan(rows, cols, axis, FFTW_FORWARD, buf);
  bwd_ = make_plan(rows, cols, axis, FFTW_BACKWARD, buf);
}

AxisFft::~AxisFft() { release(); }

AxisFft::AxisFft(AxisFft&& other) noexcept
    : fwd_(std::exchange(other.fwd_, nullptr)),
      bwd_(std::exchange(other.bwd_, nullptr)),
      length_(other.length_) {}

AxisFft& AxisFft::operator=(AxisFft&& other) noexcept {
  if (this != &other) {
    release();
    fwd_ = std::exchange(other.fwd_, nullptr);
    bwd_ = std::exchange(other.bwd_, nullptr);
    length_ = other.length_;
  }
  return *this;
}

void AxisFft::release() {
  if (!fwd_ && !bwd_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fwd_ = bwd_ = nullptr;
}

void AxisFft::forward(complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void AxisFft::backward(complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

const char* fftw_version_string() { return fftw_version; }

}  // namespace kvn
