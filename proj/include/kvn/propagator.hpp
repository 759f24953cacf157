#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kvn/electronic.hpp"
#include "kvn/fft.hpp"
#include "kvn/grid.hpp"

namespace kvn {

/* all quantities in atomic units; temperatures in hartree */
struct LangevinParams {
  double mass = 0.0;
  double gamma = 0.0;
  double dt = 0.0;
  double t_phys = 0.0;
  double t_int = 0.0;
  double sigma_h = 0.0;
  bool correction = true;

  double s() const { return gamma * dt; }
};

double corrected_internal_temperature(double t_phys, double s);

/* sets t_int and sigma_h^2 = 2 mu T_int (1 - e^{-2s}) */
LangevinParams calibrate(LangevinParams params, double t_int);

/* validated params with T_int from the bias correction when enabled */
LangevinParams make_langevin_params(double mass, double gamma, double dt, double t_phys,
                                    bool correction);

inline constexpr double kFilterCollapseThreshold = 1e-6;
inline constexpr double kBoundaryLeakThreshold = 1e-3;

struct StepReport {
  double success_probability = 1.0;
  double norm_before_renormalization = 1.0;
  /* |1 - norm^2| removed by renormalizing after friction */
  double friction_correction = 0.0;
  bool boundary_leak = false;
  double log_cumulative_success = 0.0;
};

/*
 * Strang step drift(dt/2) kick(dt) drift(dt/2); with substeps > 1 the
 * dt is split and neighbouring half drifts merged.
 */
class NveStepper {
 public:
  NveStepper(GridPtr grid, const PesModel& pes, double mass, double dt, int substeps = 1);

  void apply(KvnState& state) const;
  int substeps() const { return substeps_; }

 private:
  GridPtr grid_;
  int substeps_;
  AxisFft fft_r_, fft_p_;
  ComplexBuffer drift_half_, drift_full_, kick_;
};

/* Band-limited resampler psi(P) -> e^{s/2} psi(e^s P) on one momentum axis. */
class FrictionStepper {
 public:
  FrictionStepper(std::span<const double> p_axis, double dp, double s);

  /* rows x N_P buffer in (R,P); out is scratch of the same size, swapped in */
  double apply(ComplexBuffer& data, ComplexBuffer& scratch, std::size_t rows) const;

  std::span<const double> matrix() const { return matrix_; }
  bool identity() const { return identity_; }

 private:
  std::size_t n_;
  bool identity_;
  std::vector<double> matrix_;
};

enum class DiffusionKernel { Cosine, IdealGaussian };

class DiffusionStepper {
 public:
  DiffusionStepper(std::size_t rows, std::span<const double> k_p, double sigma,
                   DiffusionKernel kernel = DiffusionKernel::Cosine);

  /* (R,P) in and out; returns success probability, renormalizes */
  double apply(complex* data) const;
  /* same, but the buffer is already in (R,k_P) */
  double apply_from_kp(complex* data) const;

 private:
  std::size_t rows_, cols_;
  AxisFft fft_;
  std::vector<double> factor_;
};

class LangevinStepper {
 public:
  LangevinStepper(GridPtr grid, const PesModel& pes, const LangevinParams& params);

  StepReport step(KvnState& state);
  const LangevinParams& params() const { return params_; }
  double log_cumulative_success() const { return log_success_; }

 private:
  GridPtr grid_;
  LangevinParams params_;
  NveStepper nve_;
  FrictionStepper friction_;
  DiffusionStepper diffusion_;
  ComplexBuffer scratch_;
  double log_success_ = 0.0;
};

KvnState nve_step(KvnState state, const PesModel& pes, double mass, double dt);
std::pair<KvnState, StepReport> friction_step(KvnState state, double s);
std::pair<KvnState, StepReport> diffusion_step(KvnState state, double sigma);
/* test hook: amplitude kernel exp(-sigma^2 k^2 / 2), the Gaussian limit of cos */
std::pair<KvnState, StepReport> ideal_gaussian_diffusion_step(KvnState state, double sigma);
std::pair<KvnState, StepReport> langevin_step(KvnState state, const PesModel& pes,
                                              const LangevinParams& params);

struct BiasResult {
  double measured = 0.0;
  /* 1/2 tanh s */
  double leading_order = 0.0;
  double t_kin = 0.0;
  int steps = 0;
};

/* V = 0, friction + cos filter on one momentum line until <P^2> is stationary */
BiasResult momentum_bias_experiment(const PhaseSpaceGrid& grid, const LangevinParams& params,
                                    int max_steps,
                                    DiffusionKernel kernel = DiffusionKernel::Cosine);

}  // namespace kvn
