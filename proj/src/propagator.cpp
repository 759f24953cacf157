#include "kvn/propagator.hpp"

#include <fmt/format.h>

#include <cmath>
#include <deque>

#include "kvn/error.hpp"
#include "kvn/kernels.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace k = kernels::parallel;

double corrected_internal_temperature(double t_phys, double s) {
  return t_phys / (1.0 + 0.5 * std::tanh(s));
}

LangevinParams calibrate(LangevinParams p, double t_int) {
  p.t_int = t_int;
  p.sigma_h = std::sqrt(2.0 * p.mass * t_int * -std::expm1(-2.0 * p.s()));
  return p;
}

LangevinParams make_langevin_params(double mass, double gamma, double dt, double t_phys,
                                    bool correction) {
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(gamma > 0.0)) throw ConfigError("langevin.gamma must be positive");
  if (!(dt > 0.0)) throw ConfigError("langevin.dt must be positive");
  if (!(t_phys > 0.0)) throw ConfigError("temperature must be positive");
  LangevinParams p;
  p.mass = mass;
  p.gamma = gamma;
  p.dt = dt;
  p.t_phys = t_phys;
  p.correction = correction;
  return calibrate(p, correction ? corrected_internal_temperature(t_phys, p.s()) : t_phys);
}

namespace {

ComplexBuffer drift_table(const PhaseSpaceGrid& g, double mass, double tau) {
  ComplexBuffer t(g.size());
  const double scale = 1.0 / static_cast<double>(g.size_r());
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    const double kr = g.k_r()[j];
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double phase = -tau * g.p()[l] * kr / mass;
      t[g.index(j, l)] = {scale * std::cos(phase), scale * std::sin(phase)};
    }
  }
  return t;
}

ComplexBuffer kick_table(const PhaseSpaceGrid& g, const std::vector<double>& force, double tau) {
  ComplexBuffer t(g.size());
  const double scale = 1.0 / static_cast<double>(g.size_p());
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double phase = -tau * force[j] * g.k_p()[l];
      t[g.index(j, l)] = {scale * std::cos(phase), scale * std::sin(phase)};
    }
  }
  return t;
}

}  // namespace

NveStepper::NveStepper(GridPtr grid, const PesModel& pes, double mass, double dt, int substeps)
    : grid_(std::move(grid)),
      substeps_(substeps),
      fft_r_(grid_->size_r(), grid_->size_p(), Axis::R),
      fft_p_(grid_->size_r(), grid_->size_p(), Axis::P) {
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  if (substeps < 1) throw ConfigError("substeps must be >= 1");
  const double tau = dt / substeps;
  const PesTable table = tabulate_pes(pes, *grid_);
  drift_half_ = drift_table(*grid_, mass, 0.5 * tau);
  if (substeps > 1) drift_full_ = drift_table(*grid_, mass, tau);
  kick_ = kick_table(*grid_, table.force, tau);
}

void NveStepper::apply(KvnState& state) const {
  state.require_basis(Basis::RP, "nve_step");
  complex* d = state.data();
  auto a = state.amplitudes();
  fft_r_.forward(d);
  k::multiply(a, drift_half_);
  fft_r_.backward(d);
  for (int i = 0; i < substeps_; ++i) {
    fft_p_.forward(d);
    k::multiply(a, kick_);
    fft_p_.backward(d);
    fft_r_.forward(d);
    k::multiply(a, i + 1 == substeps_ ? drift_half_ : drift_full_);
    fft_r_.backward(d);
  }
}

FrictionStepper::FrictionStepper(std::span<const double> p_axis, double dp, double s)
    : n_(p_axis.size()), identity_(s == 0.0) {
  if (s < 0.0) throw ConfigError("friction s = gamma*dt must be >= 0");
  if (identity_) return;
  const std::size_t n = n_;
  const double nd = static_cast<double>(n);
  const double dk = 2.0 * units::kPi / (nd * dp);
  const double y = std::exp(-s);
  /* keep |k| < e^{-s} k_max, the band the dilation maps back inside the grid */
  long kcut = static_cast<long>(std::ceil(y * nd / 2.0)) - 1;
  while (kcut > 0 && static_cast<double>(kcut) * dk >= y * units::kPi / dp) --kcut;
  const double kh = static_cast<double>(kcut) + 0.5;
  const double jac = std::exp(0.5 * s);
  const double lo = p_axis.front(), hi = p_axis.back();
  const double eps = 1e-12 * (hi - lo);
  matrix_.assign(n * n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const double x = std::exp(s) * p_axis[l];
    if (x < lo - eps || x > hi + eps) continue;
    double* row = matrix_.data() + l * n;
    for (std::size_t m = 0; m < n; ++m) {
      const double u = dk * (x - p_axis[m]);
      const double den = std::sin(0.5 * u);
      const double dir = std::abs(den) < 1e-14 ? 2.0 * kh : std::sin(kh * u) / den;
      row[m] = jac * dir / nd;
    }
  }
}

double FrictionStepper::apply(ComplexBuffer& data, ComplexBuffer& scratch, std::size_t rows) const {
  if (identity_) return 0.0;
  scratch.resize(data.size());
  const double before = k::sum_abs2(data, rows, n_);
  k::resample_rows(data, scratch, rows, n_, matrix_);
  std::swap(data, scratch);
  const double after = k::sum_abs2(data, rows, n_);
  if (!(after > 0.0) || !std::isfinite(after))
    throw NumericalError("friction step removed the whole state");
  k::scale(data, std::sqrt(before / after));
  return std::abs(1.0 - after / before);
}

DiffusionStepper::DiffusionStepper(std::size_t rows, std::span<const double> k_p, double sigma,
                                   DiffusionKernel kernel)
    : rows_(rows), cols_(k_p.size()), fft_(rows, k_p.size(), Axis::P), factor_(k_p.size()) {
  if (sigma < 0.0) throw ConfigError("sigma_H must be >= 0");
  const double scale = 1.0 / static_cast<double>(cols_);
  for (std::size_t l = 0; l < cols_; ++l) {
    const double x = sigma * k_p[l];
    factor_[l] = scale * (kernel == DiffusionKernel::Cosine ? std::cos(x) : std::exp(-0.5 * x * x));
  }
}

double DiffusionStepper::apply(complex* data) const {
  fft_.forward(data);
  return apply_from_kp(data);
}

double DiffusionStepper::apply_from_kp(complex* data) const {
  std::span<complex> a(data, rows_ * cols_);
  /* the buffer holds an unscaled forward transform here */
  const double before = k::sum_abs2(a, rows_, cols_) / static_cast<double>(cols_);
  k::multiply_columns(a, rows_, cols_, factor_);
  fft_.backward(data);
  const double after = k::sum_abs2(a, rows_, cols_);
  const double success = after / before;
  if (!(success >= kFilterCollapseThreshold))
    throw FilterCollapseError(
        fmt::format("cos-filter success probability {:.3e} below {:.0e}", success, kFilterCollapseThreshold));
  k::scale(a, 1.0 / std::sqrt(success));
  return success;
}

LangevinStepper::LangevinStepper(GridPtr grid, const PesModel& pes, const LangevinParams& params)
    : grid_(grid),
      params_(params),
      nve_(grid, pes, params.mass, params.dt),
      friction_(grid->p(), grid->dp(), params.s()),
      diffusion_(grid->size_r(), grid->k_p(), params.sigma_h) {}

StepReport LangevinStepper::step(KvnState& state) {
  nve_.apply(state);
  StepReport rep;
  rep.friction_correction = friction_.apply(state.storage(), scratch_, grid_->size_r());
  rep.boundary_leak = rep.friction_correction > kBoundaryLeakThreshold;
  rep.success_probability = diffusion_.apply(state.data());
  rep.norm_before_renormalization = std::sqrt(rep.success_probability);
  log_success_ += std::log(rep.success_probability);
  rep.log_cumulative_success = log_success_;
  return rep;
}

KvnState nve_step(KvnState state, const PesModel& pes, double mass, double dt) {
  NveStepper(state.grid_ptr(), pes, mass, dt).apply(state);
  return state;
}

std::pair<KvnState, StepReport> friction_step(KvnState state, double s) {
  state.require_basis(Basis::RP, "friction_step");
  const auto& g = state.grid();
  FrictionStepper f(g.p(), g.dp(), s);
  ComplexBuffer scratch;
  StepReport rep;
  rep.friction_correction = f.apply(state.storage(), scratch, g.size_r());
  rep.boundary_leak = rep.friction_correction > kBoundaryLeakThreshold;
  return {std::move(state), rep};
}

namespace {

std::pair<KvnState, StepReport> diffuse(KvnState state, double sigma, DiffusionKernel kernel) {
  if (state.basis() == Basis::KrP) state = inverse_fourier_r(std::move(state));
  const auto& g = state.grid();
  DiffusionStepper d(g.size_r(), g.k_p(), sigma, kernel);
  StepReport rep;
  if (state.basis() == Basis::RKp) {
    /* apply_from_kp expects an unscaled forward transform */
    k::scale(state.amplitudes(), std::sqrt(static_cast<double>(g.size_p())));
    rep.success_probability = d.apply_from_kp(state.data());
  } else {
    rep.success_probability = d.apply(state.data());
  }
  state.set_basis(Basis::RP);
  rep.norm_before_renormalization = std::sqrt(rep.success_probability);
  rep.log_cumulative_success = std::log(rep.success_probability);
  return {std::move(state), rep};
}

}  // namespace

std::pair<KvnState, StepReport> diffusion_step(KvnState state, double sigma) {
  return diffuse(std::move(state), sigma, DiffusionKernel::Cosine);
}

std::pair<KvnState, StepReport> ideal_gaussian_diffusion_step(KvnState state, double sigma) {
  return diffuse(std::move(state), sigma, DiffusionKernel::IdealGaussian);
}

std::pair<KvnState, StepReport> langevin_step(KvnState state, const PesModel& pes,
                                              const LangevinParams& params) {
  LangevinStepper stepper(state.grid_ptr(), pes, params);
  StepReport rep = stepper.step(state);
  return {std::move(state), rep};
}

BiasResult momentum_bias_experiment(const PhaseSpaceGrid& grid, const LangevinParams& params,
                                    int max_steps, DiffusionKernel kernel) {
  constexpr int kWindow = 50;
  constexpr double kTol = 1e-8;
  const std::size_t n = grid.size_p();
  const auto p = grid.p();
  const double var = params.mass * params.t_int;

  ComplexBuffer psi(n), scratch(n);
  for (std::size_t l = 0; l < n; ++l) psi[l] = std::exp(-p[l] * p[l] / (4.0 * var));

  FrictionStepper friction(p, grid.dp(), params.s());
  DiffusionStepper diffusion(1, grid.k_p(), params.sigma_h, kernel);

  auto second_moment = [&] {
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double w = std::norm(psi[l]);
      num += p[l] * p[l] * w;
      den += w;
    }
    return num / den;
  };

  std::deque<double> history;
  for (int step = 1; step <= max_steps; ++step) {
    friction.apply(psi, scratch, 1);
    diffusion.apply(psi.data());
    const double m2 = second_moment();
    history.push_back(m2);
    if (static_cast<int>(history.size()) > kWindow) {
      const double old = history.front();
      history.pop_front();
      if (std::abs(m2 - old) < kTol * m2) {
        BiasResult r;
        r.t_kin = m2 / params.mass;
        r.measured = r.t_kin / params.t_int - 1.0;
        r.leading_order = 0.5 * std::tanh(params.s());
        r.steps = step;
        return r;
      }
    }
  }
  throw ConvergenceError(fmt::format("momentum bias experiment not stationary after {} steps", max_steps));
}

}  // namespace kvn
