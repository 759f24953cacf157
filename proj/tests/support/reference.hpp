#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kvn/units.hpp"

namespace kvn::testref {

/*
 * Frozen values, computed once offline with numpy/scipy and pyscf and kept
 * fixed here so regressions cannot move the target.
 */

/* stationary bias of friction + cos filter from the infinite cos product,
   mu = 918.0763, Simpson on 20001 points, r <= ceil(40/s) */
struct FrozenBias {
  double s;
  double bias;
};
inline constexpr FrozenBias kFrozenBias[] = {
    {0.005, 0.0025104620806193356},
    {0.01, 0.005042032214625403},
    {0.05, 0.02608977628426068},
    {0.1, 0.05458021418380721},
};

/* composite Simpson on [a, b] with n (even) panels */
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/*
 * Fixed point of friction + cos filter in k space: psi(k) = prod_r cos(sigma y^r k),
 * y = e^{-s}, zero beyond the first node k = pi / (2 sigma). Returns <P^2>/(mu T) - 1.
 */
inline double bias_product_oracle(double s, double mass, double t_int, int panels = 20000) {
  const double y = std::exp(-s);
  const double sigma = std::sqrt(2.0 * mass * t_int * -std::expm1(-2.0 * s));
  const int rmax = static_cast<int>(std::ceil(40.0 / s));
  std::vector<double> a(rmax + 1);
  for (int r = 0; r <= rmax; ++r) a[r] = sigma * std::pow(y, r);
  const double kmax = kvn::units::kPi / (2.0 * sigma);
  const double h = kmax / panels;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double k = i * h;
    double prod = 1.0, dlog = 0.0;
    for (double ar : a) {
      const double c = std::cos(ar * k);
      prod *= c;
      dlog += ar * std::tan(ar * k);
    }
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    den += w * prod * prod;
    /* cos(pi/2) rounds to ~6e-17, so prod * tan stays finite at the node */
    const double deriv = prod * dlog;
    num += w * deriv * deriv;
  }
  return num / den / (mass * t_int) - 1.0;
}

/* 1-D TST: sqrt(T / (2 pi mu)) e^{-V(R_dagger)/T} / int_{lo}^{R_dagger} e^{-V/T} dR */
inline double tst_rate_oracle(const std::function<double(double)>& v, double mass, double t, double r_lo,
                              double r_dagger, int panels = 8192) {
  const double vmin = [&] {
    double m = v(r_lo);
    for (int i = 0; i <= panels; ++i) m = std::min(m, v(r_lo + (r_dagger - r_lo) * i / panels));
    return m;
  }();
  const double z = simpson([&](double r) { return std::exp(-(v(r) - vmin) / t); }, r_lo, r_dagger, panels);
  return std::sqrt(t / (2.0 * kvn::units::kPi * mass)) * std::exp(-(v(r_dagger) - vmin) / t) / z;
}

}  // namespace kvn::testref
