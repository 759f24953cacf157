#include "kvn/kernels.hpp"

#include <vector>

namespace kvn::kernels {

namespace {

/* plain product; std::complex operator* goes through __muldc3 */
inline complex cmul(complex a, complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

template <bool Par>
void multiply_impl(std::span<complex> a, std::span<const complex> table) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] = cmul(a[i], table[i]);
}

template <bool Par>
void multiply_columns_impl(std::span<complex> a, std::size_t rows, std::size_t cols,
                           std::span<const double> factor) {
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    complex* row = a.data() + j * cols;
    for (std::size_t l = 0; l < cols; ++l) row[l] *= factor[l];
  }
}

template <bool Par>
void scale_impl(std::span<complex> a, double f) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] *= f;
}

template <bool Par>
void resample_rows_impl(std::span<const complex> in, std::span<complex> out, std::size_t rows,
                        std::size_t cols, std::span<const double> matrix) {
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    const double* src = reinterpret_cast<const double*>(in.data() + j * cols);
    complex* dst = out.data() + j * cols;
    for (std::size_t l = 0; l < cols; ++l) {
      const double* m = matrix.data() + l * cols;
      double re = 0.0, im = 0.0;
      for (std::size_t n = 0; n < cols; ++n) {
        re += m[n] * src[2 * n];
        im += m[n] * src[2 * n + 1];
      }
      dst[l] = {re, im};
    }
  }
}

template <bool Par>
double sum_abs2_impl(std::span<const complex> a, std::size_t rows, std::size_t cols) {
  std::vector<double> partial(rows);
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    const complex* row = a.data() + j * cols;
    double s = 0.0;
    for (std::size_t l = 0; l < cols; ++l)
      s += row[l].real() * row[l].real() + row[l].imag() * row[l].imag();
    partial[j] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

template <bool Par>
complex inner_product_impl(std::span<const complex> a, std::span<const complex> b,
                           std::size_t rows, std::size_t cols) {
  std::vector<complex> partial(rows);
  const std::ptrdiff_t nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t j = 0; j < nr; ++j) {
    const complex* x = a.data() + j * cols;
    const complex* y = b.data() + j * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t l = 0; l < cols; ++l) {
      re += x[l].real() * y[l].real() + x[l].imag() * y[l].imag();
      im += x[l].real() * y[l].imag() - x[l].imag() * y[l].real();
    }
    partial[j] = {re, im};
  }
  complex total = 0.0;
  for (complex s : partial) total += s;
  return total;
}

template <bool Par>
void abs2_impl(std::span<const complex> a, std::span<double> out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static) if (Par)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

}  // namespace

namespace serial {

void multiply(std::span<complex> a, std::span<const complex> table) { multiply_impl<false>(a, table); }
void multiply_columns(std::span<complex> a, std::size_t rows, std::size_t cols,
                      std::span<const double> factor) {
  multiply_columns_impl<false>(a, rows, cols, factor);
}
void scale(std::span<complex> a, double f) { scale_impl<false>(a, f); }
void resample_rows(std::span<const complex> in, std::span<complex> out, std::size_t rows,
                   std::size_t cols, std::span<const double> matrix) {
  resample_rows_impl<false>(in, out, rows, cols, matrix);
}
double sum_abs2(std::span<const complex> a, std::size_t rows, std::size_t cols) {
  return sum_abs2_impl<false>(a, rows, cols);
}
complex inner_product(std::span<const complex> a, std::span<const complex> b, std::size_t rows,
                      std::size_t cols) {
  return inner_product_impl<false>(a, b, rows, cols);
}
void abs2(std::span<const complex> a, std::span<double> out) { abs2_impl<false>(a, out); }

}  // namespace serial

namespace parallel {

void multiply(std::span<complex> a, std::span<const complex> table) { multiply_impl<true>(a, table); }
void multiply_columns(std::span<complex> a, std::size_t rows, std::size_t cols,
                      std::span<const double> factor) {
  multiply_columns_impl<true>(a, rows, cols, factor);
}
void scale(std::span<complex> a, double f) { scale_impl<true>(a, f); }
void resample_rows(std::span<const complex> in, std::span<complex> out, std::size_t rows,
                   std::size_t cols, std::span<const double> matrix) {
  resample_rows_impl<true>(in, out, rows, cols, matrix);
}
double sum_abs2(std::span<const complex> a, std::size_t rows, std::size_t cols) {
  return sum_abs2_impl<true>(a, rows, cols);
}
complex inner_product(std::span<const complex> a, std::span<const complex> b, std::size_t rows,
                      std::size_t cols) {
  return inner_product_impl<true>(a, b, rows, cols);
}
void abs2(std::span<const complex> a, std::span<double> out) { abs2_impl<true>(a, out); }

}  // namespace parallel

}  // namespace kvn::kernels
