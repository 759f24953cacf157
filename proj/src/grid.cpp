#include "kvn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kvn/error.hpp"
#include "kvn/fft.hpp"
#include "kvn/kernels.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace {

std::vector<double> axis_nodes(std::size_t n, Range range) {
  std::vector<double> x(n);
  const double d = (range.hi - range.lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = range.lo + d * static_cast<double>(i);
  return x;
}

std::vector<double> sorted_copy(std::span<const double> k) {
  std::vector<double> out(k.begin(), k.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> fft_frequencies(std::size_t n, double d) {
  std::vector<double> k(n);
  const double dk = 2.0 * units::kPi / (static_cast<double>(n) * d);
  for (std::size_t m = 0; m < n; ++m) {
    const auto mm = static_cast<std::ptrdiff_t>(m);
    const auto nn = static_cast<std::ptrdiff_t>(n);
    k[m] = dk * static_cast<double>(m < n / 2 ? mm : mm - nn);
  }
  return k;
}

PhaseSpaceGrid::PhaseSpaceGrid(int n_r_qubits, int n_p_qubits, Range r, Range p)
    : n_r_qubits_(n_r_qubits), n_p_qubits_(n_p_qubits), r_range_(r), p_range_(p) {
  for (int q : {n_r_qubits, n_p_qubits}) {
    if (q < 3 || q > 14)
      throw ConfigError("grid qubit count " + std::to_string(q) + " outside [3, 14]");
  }
  if (!(r.lo < r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw ConfigError("R range must be finite and strictly increasing");
  if (!(p.lo < p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi))
    throw ConfigError("P range must be finite and strictly increasing");
  const std::size_t nr = std::size_t{1} << n_r_qubits;
  const std::size_t np = std::size_t{1} << n_p_qubits;
  dr_ = (r.hi - r.lo) / static_cast<double>(nr);
  dp_ = (p.hi - p.lo) / static_cast<double>(np);
  r_ = axis_nodes(nr, r);
  p_ = axis_nodes(np, p);
  k_r_ = fft_frequencies(nr, dr_);
  k_p_ = fft_frequencies(np, dp_);
}

std::vector<double> PhaseSpaceGrid::k_r_sorted() const { return sorted_copy(k_r_); }
std::vector<double> PhaseSpaceGrid::k_p_sorted() const { return sorted_copy(k_p_); }

GridPtr build_grid(int n_r, int n_p, Range r_range, Range p_range) {
  return std::make_shared<const PhaseSpaceGrid>(n_r, n_p, r_range, p_range);
}

const char* basis_name(Basis b) {
  switch (b) {
    case Basis::RP: return "(R,P)";
    case Basis::KrP: return "(k_R,P)";
    case Basis::RKp: return "(R,k_P)";
  }
  return "?";
}

KvnState::KvnState(GridPtr grid, Basis basis)
    : grid_(std::move(grid)), basis_(basis), amp_(grid_->size(), complex{0.0, 0.0}) {}

double KvnState::norm_squared() const {
  return kernels::parallel::sum_abs2(amp_, grid_->size_r(), grid_->size_p()) * grid_->cell_area();
}

double KvnState::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalError("cannot normalize a zero or non-finite state");
  kernels::parallel::scale(amp_, 1.0 / std::sqrt(n2));
  return n2;
}

void KvnState::require_basis(Basis b, const char* op) const {
  if (basis_ != b)
    throw BasisError(std::string(op) + ": expected basis " + basis_name(b) + ", got " +
                     basis_name(basis_));
}

KvnState encode_gaussian(GridPtr grid, double r0, double p0, double s_r, double s_p) {
  const auto& g = *grid;
  if (r0 < g.r_min() || r0 >= g.r_max() || p0 < g.p_min() || p0 >= g.p_max())
    throw ConfigError("packet centre lies outside the grid");
  if (s_r < 2.0 * g.dr() || s_p < 2.0 * g.dp())
    throw ResolutionError("packet width below two grid spacings");
  std::vector<double> fr(g.size_r()), fp(g.size_p());
  for (std::size_t j = 0; j < fr.size(); ++j) {
    const double x = g.r()[j] - r0;
    fr[j] = std::exp(-x * x / (4.0 * s_r * s_r));
  }
  for (std::size_t l = 0; l < fp.size(); ++l) {
    const double y = g.p()[l] - p0;
    fp[l] = std::exp(-y * y / (4.0 * s_p * s_p));
  }
  KvnState s(std::move(grid), Basis::RP);
  for (std::size_t j = 0; j < fr.size(); ++j)
    for (std::size_t l = 0; l < fp.size(); ++l) s(j, l) = fr[j] * fp[l];
  s.normalize();
  return s;
}

namespace {

KvnState transform(KvnState state, Basis from, Basis to, Axis axis, bool forward, const char* op) {
  state.require_basis(from, op);
  const auto& g = state.grid();
  AxisFft fft(g.size_r(), g.size_p(), axis);
  if (forward)
    fft.forward(state.data());
  else
    fft.backward(state.data());
  kernels::parallel::scale(state.amplitudes(), 1.0 / std::sqrt(static_cast<double>(fft.length())));
  state.set_basis(to);
  return state;
}

}  // namespace

KvnState fourier_p(KvnState state) {
  return transform(std::move(state), Basis::RP, Basis::RKp, Axis::P, true, "fourier_p");
}
KvnState inverse_fourier_p(KvnState state) {
  return transform(std::move(state), Basis::RKp, Basis::RP, Axis::P, false, "inverse_fourier_p");
}
KvnState fourier_r(KvnState state) {
  return transform(std::move(state), Basis::RP, Basis::KrP, Axis::R, true, "fourier_r");
}
KvnState inverse_fourier_r(KvnState state) {
  return transform(std::move(state), Basis::KrP, Basis::RP, Axis::R, false, "inverse_fourier_r");
}

std::vector<double> density(const KvnState& state) {
  state.require_basis(Basis::RP, "density");
  std::vector<double> rho(state.grid().size());
  kernels::parallel::abs2(state.amplitudes(), rho);
  return rho;
}

std::vector<double> r_marginal(const PhaseSpaceGrid& g, std::span<const double> rho) {
  std::vector<double> m(g.size_r(), 0.0);
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < g.size_p(); ++l) s += rho[g.index(j, l)];
    m[j] = s * g.dp();
  }
  return m;
}

std::vector<double> p_marginal(const PhaseSpaceGrid& g, std::span<const double> rho) {
  std::vector<double> m(g.size_p(), 0.0);
  for (std::size_t j = 0; j < g.size_r(); ++j)
    for (std::size_t l = 0; l < g.size_p(); ++l) m[l] += rho[g.index(j, l)];
  for (double& x : m) x *= g.dr();
  return m;
}

}  // namespace kvn
