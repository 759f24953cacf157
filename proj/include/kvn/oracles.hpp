#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kvn/electronic.hpp"
#include "kvn/grid.hpp"

namespace kvn {

/* SplitMix64 stream keyed by (seed, stream index); draws never depend on scheduling */
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /* uniform on (0, 1) */
  double uniform();
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct PhasePoint {
  double r = 0.0;
  double p = 0.0;
};

struct Trajectory {
  std::vector<double> r, p;
};

struct TrajectoryEnsemble {
  /* spacing of the stored samples */
  double sample_dt = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<Trajectory> trajectories;
};

/* dt*omega at r0 (from |V''|) must stay below this */
inline constexpr double kMaxVerletPhase = 0.1;

/* velocity Verlet; stores n_steps / record_every + 1 samples including t = 0 */
Trajectory verlet_trajectory(const PesModel& pes, double mass, double r0, double p0, double dt,
                             int n_steps, int record_every = 1);

TrajectoryEnsemble verlet_ensemble(const PesModel& pes, double mass,
                                   std::span<const PhasePoint> initial, double dt, int n_steps,
                                   int record_every, std::uint64_t seed = 0);

/* BAOAB; trajectory i uses stream i of the seed */
TrajectoryEnsemble langevin_ensemble(const PesModel& pes, double mass, double gamma,
                                     double temperature, double dt, int n_steps,
                                     std::span<const PhasePoint> initial, std::uint64_t seed,
                                     int record_every);

struct SamplerResult {
  std::vector<PhasePoint> samples;
  double acceptance_rate = 0.0;
  /* acceptance outside [0.1, 0.9] after adaptation */
  bool warning = false;
};

inline constexpr int kSamplerChains = 16;
inline constexpr int kSamplerBurnIn = 1000;
inline constexpr int kSamplerThinning = 10;

/* P exact Maxwell; R Metropolis on e^{-V/T} restricted to r_range */
SamplerResult canonical_sampler(const PesModel& pes, double mass, double temperature,
                                std::size_t n, std::uint64_t seed, Range r_range);

TrajectoryEnsemble langevin_ensemble(const PesModel& pes, double mass, double gamma,
                                     double temperature, double dt, int n_steps, std::size_t n,
                                     std::uint64_t seed, Range r_range, int record_every);

/* cell (j,l) covers [R_j - dR/2, R_j + dR/2) x [P_l - dP/2, P_l + dP/2); normalized over
   samples that land on the grid */
std::vector<double> histogram_density(std::span<const PhasePoint> samples, const PhaseSpaceGrid& grid);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/* batch-means standard error for correlated series */
MeanEstimate batch_mean(std::span<const double> x, int n_batches = 32);

/* final (R,P) of every trajectory */
std::vector<PhasePoint> final_points(const TrajectoryEnsemble& ens);

}  // namespace kvn
