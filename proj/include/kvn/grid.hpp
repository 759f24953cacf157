#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kvn/aligned.hpp"

namespace kvn {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/*
 * Uniform periodic (R,P) grid. Nodes are R_j = R_min + j*dR for j < N_R
 * (R_max itself is the periodic image of R_min); P likewise.
 *
 * Conjugate grids are held in FFT order: k[m] = 2*pi*m/(N*d) for m < N/2,
 * k[m] = 2*pi*(m-N)/(N*d) otherwise, so they cover [-pi/d, pi/d).
 */
class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(int n_r_qubits, int n_p_qubits, Range r, Range p);

  int n_r_qubits() const { return n_r_qubits_; }
  int n_p_qubits() const { return n_p_qubits_; }
  std::size_t size_r() const { return r_.size(); }
  std::size_t size_p() const { return p_.size(); }
  std::size_t size() const { return r_.size() * p_.size(); }

  double r_min() const { return r_range_.lo; }
  double r_max() const { return r_range_.hi; }
  double p_min() const { return p_range_.lo; }
  double p_max() const { return p_range_.hi; }
  double dr() const { return dr_; }
  double dp() const { return dp_; }
  double cell_area() const { return dr_ * dp_; }

  std::span<const double> r() const { return r_; }
  std::span<const double> p() const { return p_; }
  std::span<const double> k_r() const { return k_r_; }
  std::span<const double> k_p() const { return k_p_; }

  /* monotonically increasing copies for output */
  std::vector<double> k_r_sorted() const;
  std::vector<double> k_p_sorted() const;

  std::size_t index(std::size_t j, std::size_t l) const { return j * p_.size() + l; }

 private:
  int n_r_qubits_;
  int n_p_qubits_;
  Range r_range_;
  Range p_range_;
  double dr_;
  double dp_;
  std::vector<double> r_, p_, k_r_, k_p_;
};

using GridPtr = std::shared_ptr<const PhaseSpaceGrid>;

GridPtr build_grid(int n_r, int n_p, Range r_range, Range p_range);

/* conjugate frequencies of an N-point axis with spacing d, FFT order */
std::vector<double> fft_frequencies(std::size_t n, double d);

enum class Basis { RP, KrP, RKp };

const char* basis_name(Basis b);

/*
 * Complex amplitude on the grid, row-major with R as the slow index.
 * Normalization convention: sum |psi|^2 dR dP = 1 in every basis (unitary
 * transforms preserve the sum).
 */
class KvnState {
 public:
  explicit KvnState(GridPtr grid, Basis basis = Basis::RP);

  const PhaseSpaceGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Basis basis() const { return basis_; }
  void set_basis(Basis b) { basis_ = b; }

  std::span<complex> amplitudes() { return amp_; }
  std::span<const complex> amplitudes() const { return amp_; }
  ComplexBuffer& storage() { return amp_; }
  complex* data() { return amp_.data(); }
  const complex* data() const { return amp_.data(); }

  complex& operator()(std::size_t j, std::size_t l) { return amp_[grid_->index(j, l)]; }
  const complex& operator()(std::size_t j, std::size_t l) const { return amp_[grid_->index(j, l)]; }

  /* sum |psi|^2 dR dP */
  double norm_squared() const;
  /* rescale to unit norm, returns the norm^2 before */
  double normalize();

  void require_basis(Basis b, const char* op) const;

 private:
  GridPtr grid_;
  Basis basis_;
  ComplexBuffer amp_;
};

KvnState encode_gaussian(GridPtr grid, double r0, double p0, double s_r, double s_p);

KvnState fourier_p(KvnState state);
KvnState inverse_fourier_p(KvnState state);
KvnState fourier_r(KvnState state);
KvnState inverse_fourier_r(KvnState state);

/* |psi|^2 on the (R,P) nodes */
std::vector<double> density(const KvnState& state);

/* marginals of a density: rho_R[j] = sum_l rho dP, rho_P[l] = sum_j rho dR */
std::vector<double> r_marginal(const PhaseSpaceGrid& grid, std::span<const double> rho);
std::vector<double> p_marginal(const PhaseSpaceGrid& grid, std::span<const double> rho);

}  // namespace kvn
