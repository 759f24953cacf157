#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kvn/electronic.hpp"
#include "kvn/grid.hpp"
#include "kvn/propagator.hpp"

namespace kvn {

inline constexpr double kLogFloor = 1e-300;

double mean_r(const KvnState& state);
double mean_p(const KvnState& state);
/* <P^2>/mu in hartree */
double kinetic_temperature(const KvnState& state, double mass);
/* <P^2/2mu + V(R)> */
double mean_energy(const KvnState& state, const PesModel& pes, double mass);

double mean_r(const PhaseSpaceGrid& grid, std::span<const double> rho);
double kinetic_temperature(const PhaseSpaceGrid& grid, std::span<const double> rho, double mass);

/* exp[-(P^2/2mu + V)/T] normalized with dR dP weights */
std::vector<double> canonical_reference(const PhaseSpaceGrid& grid, const PesModel& pes,
                                        double mass, double temperature);

double kl_divergence(std::span<const double> rho, std::span<const double> rho_eq, double cell_area);
double total_variation(std::span<const double> a, std::span<const double> b, double cell_area);

/* atomic units throughout; the CLI converts when writing */
struct RelaxationRecord {
  int step = 0;
  double time = 0.0;
  double mean_r = 0.0;
  double t_kin = 0.0;
  double d_kl = 0.0;
  double cum_success = 1.0;
};

struct RelaxationResult {
  std::vector<RelaxationRecord> trace;
  KvnState final_state;
  int steps_done = 0;
  double max_friction_correction = 0.0;
  int boundary_leak_steps = 0;
  /* set when stepping stopped on a filter collapse */
  std::string failure;
};

using SnapshotFn = std::function<void(int step, const KvnState& state)>;

RelaxationResult relax(KvnState initial, const PesModel& pes, const LangevinParams& params,
                       int n_steps, int record_every, const SnapshotFn& on_step = {});

}  // namespace kvn
