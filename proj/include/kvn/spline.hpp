#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kvn {

/* Cubic interpolating spline with not-a-knot end conditions. */
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  std::span<const double> knots() const { return x_; }

 private:
  std::size_t segment(double x) const;

  std::vector<double> x_, y_;
  /* second derivatives at the knots */
  std::vector<double> m_;
};

}  // namespace kvn
