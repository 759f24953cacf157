#pragma once

#include <cstddef>
#include <span>

#include "kvn/aligned.hpp"

/*
 * Hot loops of the propagator. Both namespaces expose the same functions
 * and produce bit-identical results; parallel splits work over rows and
 * reduces per-row partial sums in row order.
 */
namespace kvn::kernels {

namespace serial {

void multiply(std::span<complex> a, std::span<const complex> table);
void multiply_columns(std::span<complex> a, std::size_t rows, std::size_t cols,
                      std::span<const double> factor);
void scale(std::span<complex> a, double f);
void resample_rows(std::span<const complex> in, std::span<complex> out, std::size_t rows,
                   std::size_t cols, std::span<const double> matrix);
double sum_abs2(std::span<const complex> a, std::size_t rows, std::size_t cols);
complex inner_product(std::span<const complex> a, std::span<const complex> b, std::size_t rows,
                      std::size_t cols);
void abs2(std::span<const complex> a, std::span<double> out);

}  // namespace serial

namespace parallel {

void multiply(std::span<complex> a, std::span<const complex> table);
void multiply_columns(std::span<complex> a, std::size_t rows, std::size_t cols,
                      std::span<const double> factor);
void scale(std::span<complex> a, double f);
void resample_rows(std::span<const complex> in, std::span<complex> out, std::size_t rows,
                   std::size_t cols, std::span<const double> matrix);
double sum_abs2(std::span<const complex> a, std::size_t rows, std::size_t cols);
complex inner_product(std::span<const complex> a, std::span<const complex> b, std::size_t rows,
                      std::size_t cols);
void abs2(std::span<const complex> a, std::span<double> out);

}  // namespace parallel

}  // namespace kvn::kernels
