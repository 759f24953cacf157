#include "kvn/vdos.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "kvn/error.hpp"
#include "kvn/fft.hpp"
#include "kvn/kernels.hpp"
#include "kvn/propagator.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace {

constexpr double kTwoPi = 2.0 * units::kPi;
constexpr int kOversample = 16;

}  // namespace

const char* branch_name(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

double QpeConfig::window() const { return kTwoPi / tau; }
double QpeConfig::bin_width() const { return window() / static_cast<double>(bins()); }
double QpeConfig::bin_center(std::size_t j) const {
  return omega_shift + bin_width() * static_cast<double>(j);
}

void QpeConfig::validate() const {
  if (ancillas < 1 || ancillas > 16) throw ConfigError("vdos.ancillas must be in [1, 16]");
  if (!(tau > 0.0)) throw ConfigError("vdos.tau must be positive");
  if (trotter_substeps < 1) throw ConfigError("vdos.trotter_substeps must be >= 1");
}

std::size_t SpectrumResult::peak_bin(std::size_t limit) const {
  const std::size_t n = limit == 0 ? probability.size() : std::min(limit, probability.size());
  return static_cast<std::size_t>(std::max_element(probability.begin(), probability.begin() + n) -
                                  probability.begin());
}

double fejer_kernel(int m, double theta) {
  const double M = std::ldexp(1.0, m);
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-12) return M;
  const double r = std::sin(0.5 * M * theta) / s;
  return r * r / M;
}

double reference_frequency(const PesModel& pes, const PhaseSpaceGrid& g, double mass, int half_window) {
  if (half_window < 2) throw ConfigError("reference_frequency: half window must be >= 2");
  const auto table = tabulate_pes(pes, g);
  const auto& v = table.potential;
  const auto jmin = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  const auto h = static_cast<std::size_t>(half_window);
  if (jmin < h || jmin + h >= v.size())
    throw DomainError("reference_frequency: minimum of V lies within the fit window of the grid edge");

  const int npts = 2 * half_window + 1;
  Eigen::MatrixXd A(npts, 5);
  Eigen::VectorXd y(npts);
  for (int i = 0; i < npts; ++i) {
    const double x = i - half_window;
    double xp = 1.0;
    for (int c = 0; c < 5; ++c) {
      A(i, c) = xp;
      xp *= x;
    }
    y(i) = v[jmin + i - h];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  /* minimum of the fitted quartic near the centre, x in units of dR */
  double x = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double d1 = c(1) + 2 * c(2) * x + 3 * c(3) * x * x + 4 * c(4) * x * x * x;
    const double d2 = 2 * c(2) + 6 * c(3) * x + 12 * c(4) * x * x;
    if (!(d2 > 0.0)) break;
    const double dx = d1 / d2;
    x -= dx;
    if (std::abs(dx) < 1e-14) break;
  }
  const double d2 = (2 * c(2) + 6 * c(3) * x + 12 * c(4) * x * x) / (g.dr() * g.dr());
  if (!(d2 > 0.0)) throw DomainError("reference_frequency: non-positive curvature at the minimum");
  return std::sqrt(d2 / mass);
}

double default_qpe_tau(double omega_ref) { return 0.5 * units::kPi / omega_ref; }

int default_trotter_substeps(double omega_ref, double tau) {
  return std::max(1, static_cast<int>(std::ceil(omega_ref * tau / 0.2 - 1e-12)));
}

BranchStates prepare_branch_states(const KvnState& eq, double omega_ref, double mass) {
  eq.require_basis(Basis::RP, "prepare_branch_states");
  if (!(omega_ref > 0.0)) throw ConfigError("omega_ref must be positive");
  const auto& g = eq.grid();
  const double rbar = [&] {
    const auto rho = density(eq);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.size_r(); ++j)
      for (std::size_t l = 0; l < g.size_p(); ++l) {
        num += g.r()[j] * rho[g.index(j, l)];
        den += rho[g.index(j, l)];
      }
    return num / den;
  }();
  BranchStates out{KvnState(eq.grid_ptr()), KvnState(eq.grid_ptr()), 0.0, 0.0, rbar};
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    const double q = g.r()[j] - rbar;
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double pi = g.p()[l] / (mass * omega_ref);
      const complex a = eq(j, l);
      out.plus(j, l) = complex(q, -pi) * a;
      out.minus(j, l) = complex(q, pi) * a;
    }
  }
  out.weight_plus = out.plus.norm_squared();
  out.weight_minus = out.minus.norm_squared();
  if (!(out.weight_plus > 0.0) || !(out.weight_minus > 0.0))
    throw NumericalError("prepare_branch_states: zero-norm branch");
  out.plus.normalize();
  out.minus.normalize();
  return out;
}

std::vector<double> fejer_binned_spectrum(std::span<const complex> c, const QpeConfig& cfg) {
  const std::size_t M = cfg.bins();
  if (c.size() < M) throw ConfigError("fejer_binned_spectrum: need 2^m overlaps");
  const double Md = static_cast<double>(M);
  std::vector<double> p(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double theta = cfg.omega_shift * cfg.tau + kTwoPi * static_cast<double>(j) / Md;
    double acc = 0.0;
    for (std::size_t d = 1; d < M; ++d) {
      const double ph = theta * static_cast<double>(d);
      acc += static_cast<double>(M - d) * (c[d].real() * std::cos(ph) - c[d].imag() * std::sin(ph));
    }
    p[j] = (Md * c[0].real() + 2.0 * acc) / (Md * Md);
  }
  return p;
}

std::vector<double> qpe_distribution(const KvnState& input, const UnitaryStep& u, const QpeConfig& cfg) {
  cfg.validate();
  const auto& g = input.grid();
  const std::size_t M = cfg.bins();
  std::vector<complex> c(M);
  KvnState s = input;
  c[0] = kernels::parallel::inner_product(input.amplitudes(), s.amplitudes(), g.size_r(), g.size_p()) *
         g.cell_area();
  for (std::size_t d = 1; d < M; ++d) {
    u(s);
    c[d] = kernels::parallel::inner_product(input.amplitudes(), s.amplitudes(), g.size_r(), g.size_p()) *
           g.cell_area();
  }
  return fejer_binned_spectrum(c, cfg);
}

std::vector<double> qpe_distribution_direct(const KvnState& input, const UnitaryStep& u,
                                            const QpeConfig& cfg) {
  cfg.validate();
  const auto& g = input.grid();
  const std::size_t M = cfg.bins();
  const double Md = static_cast<double>(M);
  std::vector<ComplexBuffer> acc(M, ComplexBuffer(g.size(), complex{0.0, 0.0}));
  KvnState s = input;
  for (std::size_t k = 0; k < M; ++k) {
    if (k > 0) u(s);
    for (std::size_t j = 0; j < M; ++j) {
      const double theta = cfg.omega_shift * cfg.tau + kTwoPi * static_cast<double>(j) / Md;
      const complex w = std::polar(1.0 / Md, theta * static_cast<double>(k));
      auto src = s.amplitudes();
      for (std::size_t i = 0; i < g.size(); ++i) acc[j][i] += w * src[i];
    }
  }
  std::vector<double> p(M);
  for (std::size_t j = 0; j < M; ++j)
    p[j] = kernels::serial::sum_abs2(acc[j], g.size_r(), g.size_p()) * g.cell_area();
  return p;
}

SpectrumResult qpe_spectrum(const KvnState& input, const PesModel& pes, double mass, const QpeConfig& cfg) {
  cfg.validate();
  input.require_basis(Basis::RP, "qpe_spectrum");
  NveStepper stepper(input.grid_ptr(), pes, mass, cfg.tau, cfg.trotter_substeps);
  SpectrumResult r;
  r.probability = qpe_distribution(input, [&](KvnState& s) { stepper.apply(s); }, cfg);
  r.omega.resize(cfg.bins());
  for (std::size_t j = 0; j < cfg.bins(); ++j) r.omega[j] = cfg.bin_center(j);
  r.branch = cfg.branch;
  r.branch_weight = input.norm_squared();
  return r;
}

std::vector<complex> kvn_autocorrelation(const KvnState& eq, const PesModel& pes, double mass, double dt,
                                         int n_t, int substeps) {
  eq.require_basis(Basis::RP, "kvn_autocorrelation");
  const auto& g = eq.grid();
  KvnState q(eq.grid_ptr());
  {
    const auto rho = density(eq);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.size_r(); ++j)
      for (std::size_t l = 0; l < g.size_p(); ++l) {
        num += g.r()[j] * rho[g.index(j, l)];
        den += rho[g.index(j, l)];
      }
    const double rbar = num / den;
    for (std::size_t j = 0; j < g.size_r(); ++j)
      for (std::size_t l = 0; l < g.size_p(); ++l) q(j, l) = (g.r()[j] - rbar) * eq(j, l);
  }
  NveStepper stepper(eq.grid_ptr(), pes, mass, dt, substeps);
  std::vector<complex> c(std::max(n_t, 0));
  KvnState s = q;
  for (int n = 0; n < n_t; ++n) {
    if (n > 0) stepper.apply(s);
    c[n] = kernels::parallel::inner_product(q.amplitudes(), s.amplitudes(), g.size_r(), g.size_p()) *
           g.cell_area();
  }
  return c;
}

std::vector<double> correlation_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::cos(0.5 * units::kPi * static_cast<double>(i) / static_cast<double>(n));
      w[i] = c * c;
    }
  }
  return w;
}

std::vector<double> binned_reference_spectrum(std::span<const double> corr, int samples_per_tau,
                                              WindowKind window, const QpeConfig& cfg) {
  cfg.validate();
  if (corr.empty()) throw ConfigError("binned_reference_spectrum: empty correlation");
  if (samples_per_tau < 1) throw ConfigError("binned_reference_spectrum: samples_per_tau must be >= 1");
  const std::size_t M = cfg.bins();
  /* fine frequency grid: spacing dw / kOversample over one full period of the sampled spectrum */
  const std::size_t nfft = static_cast<std::size_t>(samples_per_tau) * M * kOversample;
  if (corr.size() > nfft) corr = corr.first(nfft);
  const double ts = cfg.tau / samples_per_tau;
  const auto w = correlation_window(window, corr.size());

  ComplexBuffer buf(nfft, complex{0.0, 0.0});
  for (std::size_t n = 0; n < corr.size(); ++n) buf[n] = w[n] * corr[n] * ts;
  /* backward carries e^{+i w t} */
  AxisFft(1, nfft, Axis::P).backward(buf.data());
  const double dwf = kTwoPi / (static_cast<double>(nfft) * ts);
  std::vector<double> s(nfft);
  for (std::size_t q = 0; q < nfft; ++q) s[q] = std::norm(buf[q]);

  std::vector<double> out(M, 0.0);
  const std::ptrdiff_t nm = static_cast<std::ptrdiff_t>(M);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < nm; ++j) {
    const double wj = cfg.bin_center(static_cast<std::size_t>(j));
    double acc = 0.0;
    for (std::size_t q = 0; q < nfft; ++q)
      acc += fejer_kernel(cfg.ancillas, (dwf * static_cast<double>(q) - wj) * cfg.tau) * s[q];
    out[j] = acc * dwf;
  }
  double total = 0.0;
  for (double x : out) total += x;
  if (!(total > 0.0)) throw NumericalError("binned_reference_spectrum: zero spectral weight");
  for (double& x : out) x /= total;
  return out;
}

SpectrumResult aimd_reference_spectrum(const TrajectoryEnsemble& ens, WindowKind window, const QpeConfig& cfg) {
  cfg.validate();
  if (ens.trajectories.empty()) throw ConfigError("aimd_reference_spectrum: empty trajectory set");
  const double ratio = cfg.tau / ens.sample_dt;
  const int L = static_cast<int>(std::lround(ratio));
  if (L < 1 || std::abs(ratio - L) > 1e-9 * ratio)
    throw ConfigError("aimd_reference_spectrum: tau must be an integer multiple of the sample spacing");
  std::size_t nt = ens.trajectories.front().r.size();
  for (const auto& t : ens.trajectories) nt = std::min(nt, t.r.size());
  nt = std::min(nt, static_cast<std::size_t>(L) * cfg.bins());

  double rsum = 0.0;
  std::size_t count = 0;
  for (const auto& t : ens.trajectories)
    for (std::size_t n = 0; n < nt; ++n) {
      rsum += t.r[n];
      ++count;
    }
  const double rbar = rsum / static_cast<double>(count);
  std::vector<double> corr(nt, 0.0);
  for (const auto& t : ens.trajectories) {
    const double q0 = t.r[0] - rbar;
    for (std::size_t n = 0; n < nt; ++n) corr[n] += (t.r[n] - rbar) * q0;
  }
  for (double& c : corr) c /= static_cast<double>(ens.trajectories.size());

  SpectrumResult r;
  r.probability = binned_reference_spectrum(corr, L, window, cfg);
  r.omega.resize(cfg.bins());
  for (std::size_t j = 0; j < cfg.bins(); ++j) r.omega[j] = cfg.bin_center(j);
  r.branch = Branch::Plus;
  r.branch_weight = corr.front();
  return r;
}

double display_frequency(const QpeConfig& cfg, std::size_t j, Branch branch) {
  const double w = cfg.bin_center(j);
  if (branch == Branch::Plus) return w;
  const double W = cfg.window();
  return std::abs(w - W * std::round(w / W));
}

}  // namespace kvn
