#include "kvn/spline.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "kvn/error.hpp"

namespace kvn {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw ConfigError("spline: x and y lengths differ");
  if (n < 4) throw ConfigError("spline: need at least 4 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw ConfigError("spline: knots must be strictly increasing");

  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  /* not-a-knot: third derivative continuous across the second and next-to-last knots */
  A(0, 0) = h[1];
  A(0, 1) = -(h[0] + h[1]);
  A(0, 2) = h[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    A(r, r - 1) = h[i - 1];
    A(r, r) = 2.0 * (h[i - 1] + h[i]);
    A(r, r + 1) = h[i];
    rhs(r) = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
  }
  A(N - 1, N - 3) = h[n - 2];
  A(N - 1, N - 2) = -(h[n - 3] + h[n - 2]);
  A(N - 1, N - 1) = h[n - 3];

  Eigen::VectorXd m = A.partialPivLu().solve(rhs);
  m_.assign(m.data(), m.data() + n);
}

std::size_t CubicSpline::segment(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::value(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double t = x - x_[i];
  const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
  return y_[i] + t * (b + t * (0.5 * m_[i] + t * (m_[i + 1] - m_[i]) / (6.0 * h)));
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double t = x - x_[i];
  const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
  return b + t * (m_[i] + t * (m_[i + 1] - m_[i]) / (2.0 * h));
}

double CubicSpline::second_derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i];
  const double t = x - x_[i];
  return m_[i] + t * (m_[i + 1] - m_[i]) / h;
}

}  // namespace kvn
