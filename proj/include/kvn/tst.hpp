#pragma once

#include <cstdint>
#include <vector>

#include "kvn/electronic.hpp"
#include "kvn/grid.hpp"

namespace kvn {

/* lengths in bohr, temperatures in hartree */
struct TstConfig {
  double r_dagger = 0.0;
  /* delta smoothing width; 0 selects 2 dR */
  double sigma = 0.0;
  std::vector<double> temperatures;
};

struct TstPoint {
  double temperature = 0.0;
  double flux = 0.0;
  double population = 0.0;
  double rate = 0.0;
};

struct ArrheniusFit {
  std::vector<TstPoint> points;
  double log_prefactor = 0.0;
  /* hartree */
  double activation_energy = 0.0;
};

/* psi = sqrt(rho_eq), zero phase */
KvnState analytic_canonical_state(GridPtr grid, const PesModel& pes, double mass, double temperature);

/* Gaussian of width sigma centred on r_dagger, renormalized so sum delta dR = 1 */
std::vector<double> smoothed_delta(const PhaseSpaceGrid& grid, double r_dagger, double sigma);

double tst_flux(const KvnState& state, double mass, const TstConfig& cfg);
double reactant_population(const KvnState& state, const TstConfig& cfg);

ArrheniusFit arrhenius_sweep(GridPtr grid, const PesModel& pes, double mass, const TstConfig& cfg);

struct CrossingResult {
  long n_cross = 0;
  int n_traj = 0;
  double t_sim = 0.0;
  double k_cross = 0.0;
  /* one crossing in the whole budget */
  double k_min = 0.0;
  bool floor_pinned() const { return n_cross == 0; }
};

/* NVE trajectories from canonical samples with R in [r_lo, R_dagger); counts positive crossings */
CrossingResult crossing_reference(const PesModel& pes, double mass, double temperature, int n_traj,
                                  double t_sim, double dt, std::uint64_t seed, const TstConfig& cfg,
                                  double r_lo);

}  // namespace kvn
