#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kvn/electronic.hpp"
#include "kvn/grid.hpp"
#include "kvn/oracles.hpp"

namespace kvn {

enum class Branch { Plus, Minus };
const char* branch_name(Branch b);

/*
 * Bin j collects frequencies near omega_shift + j * dw (mod the window),
 * dw = 2 pi / (tau 2^m).
 */
struct QpeConfig {
  int ancillas = 7;
  double tau = 0.0;
  double omega_shift = 0.0;
  Branch branch = Branch::Plus;
  /* Strang substeps per application of U(tau) */
  int trotter_substeps = 1;

  std::size_t bins() const { return std::size_t{1} << ancillas; }
  double window() const;
  double bin_width() const;
  double bin_center(std::size_t j) const;
  void validate() const;
};

struct SpectrumResult {
  std::vector<double> omega;
  std::vector<double> probability;
  Branch branch = Branch::Plus;
  double branch_weight = 0.0;

  /* argmax over bins [0, limit) */
  std::size_t peak_bin(std::size_t limit = 0) const;
};

/* (1/2^m) [sin(2^m theta / 2) / sin(theta / 2)]^2 */
double fejer_kernel(int m, double theta);

/* curvature of a local quartic fit around the grid argmin of V */
double reference_frequency(const PesModel& pes, const PhaseSpaceGrid& grid, double mass,
                           int half_window = 5);

/* omega_ref on the centre of bin 2^m / 4 */
double default_qpe_tau(double omega_ref);
int default_trotter_substeps(double omega_ref, double tau);

struct BranchStates {
  KvnState plus;
  KvnState minus;
  double weight_plus = 0.0;
  double weight_minus = 0.0;
  double mean_r = 0.0;
};

/* alpha_pm = (Q -+ i P/(mu w)) psi / norm, Q = R - <R> of psi itself */
BranchStates prepare_branch_states(const KvnState& eq, double omega_ref, double mass);

using UnitaryStep = std::function<void(KvnState&)>;

/*
 * QPE distribution from the overlaps c(d) = <a|U^d a>:
 * P_j = (1/M^2) [M c(0) + 2 Re sum_d (M-d) c(d) e^{i theta_j d}].
 * M-1 applications of U, one extra state of memory.
 */
std::vector<double> qpe_distribution(const KvnState& input, const UnitaryStep& u, const QpeConfig& cfg);

/* Reference route: one accumulator per bin, serial kernels. Memory grows as 2^m states. */
std::vector<double> qpe_distribution_direct(const KvnState& input, const UnitaryStep& u,
                                            const QpeConfig& cfg);

/* overlaps c(0..M-1) -> bin probabilities; c(0) is the squared norm */
std::vector<double> fejer_binned_spectrum(std::span<const std::complex<double>> overlaps,
                                          const QpeConfig& cfg);

SpectrumResult qpe_spectrum(const KvnState& input, const PesModel& pes, double mass,
                            const QpeConfig& cfg);

/* C_QQ(n dt) = <Q psi| U(dt)^n |Q psi>, n < n_t */
std::vector<std::complex<double>> kvn_autocorrelation(const KvnState& eq, const PesModel& pes,
                                                      double mass, double dt, int n_t,
                                                      int substeps = 1);

enum class WindowKind { Hann, Rect };

/* one-sided window on n = 0..N-1: hann is cos^2(pi n / 2N) */
std::vector<double> correlation_window(WindowKind kind, std::size_t n);

/*
 * Windowed |FT|^2 of a real correlation sampled at tau/L, wrapped into the QPE window
 * and integrated against the Fejer kernel of every bin; unit total weight.
 */
std::vector<double> binned_reference_spectrum(std::span<const double> corr, int samples_per_tau,
                                              WindowKind window, const QpeConfig& cfg);

SpectrumResult aimd_reference_spectrum(const TrajectoryEnsemble& trajectories, WindowKind window,
                                       const QpeConfig& cfg);

/* |omega| axis: the minus branch reads omega_j - window for j > 0 */
double display_frequency(const QpeConfig& cfg, std::size_t j, Branch branch);

}  // namespace kvn
