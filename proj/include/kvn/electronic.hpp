#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "kvn/grid.hpp"
#include "kvn/spline.hpp"

namespace kvn {

inline constexpr double kOmegaEpsilon = 1e-12;
inline constexpr std::size_t kMinTableRows = 8;

/* H_e(R) = a I + b Z + c X sampled on increasing R (bohr, hartree) */
struct PauliCoefficientTable {
  std::vector<double> r, a, b, c;
  std::size_t size() const { return r.size(); }
};

/* V(R) sampled on increasing R */
struct RawPesTable {
  std::vector<double> r, v;
  std::size_t size() const { return r.size(); }
};

PauliCoefficientTable load_pauli_table(std::istream& in);
void write_pauli_table(std::ostream& out, const PauliCoefficientTable& table);
RawPesTable load_raw_table(std::istream& in);

PauliCoefficientTable load_pauli_table_file(const std::string& path);
RawPesTable load_raw_table_file(const std::string& path);

class PauliModel {
 public:
  explicit PauliModel(const PauliCoefficientTable& table);

  double energy(double r) const;
  double force(double r) const;
  double curvature(double r) const;
  double omega(double r) const;
  double r_min() const { return a_.x_min(); }
  double r_max() const { return a_.x_max(); }

 private:
  void check_domain(double r) const;

  CubicSpline a_, b_, c_;
};

double ground_state_energy(const PauliCoefficientTable& table, double r);
double hf_force(const PauliCoefficientTable& table, double r);

struct MorseModel {
  double de, alpha, re;
};

/* V = sum_n coeff[n] (R - center)^n */
struct PolynomialModel {
  std::vector<double> coeff;
  double center = 0.0;
};

class RawTableModel {
 public:
  explicit RawTableModel(const RawPesTable& table);
  double energy(double r) const;
  double force(double r) const;
  double curvature(double r) const;
  double r_min() const { return v_.x_min(); }
  double r_max() const { return v_.x_max(); }

 private:
  void check_domain(double r) const;
  CubicSpline v_;
};

enum class PesKind { PauliTable, RawTable, Morse, Polynomial };

const char* pes_kind_name(PesKind k);

/* Born-Oppenheimer V(R) with consistent force and curvature; immutable. */
class PesModel {
 public:
  explicit PesModel(PauliModel m) : impl_(std::move(m)) {}
  explicit PesModel(RawTableModel m) : impl_(std::move(m)) {}
  explicit PesModel(MorseModel m) : impl_(m) {}
  explicit PesModel(PolynomialModel m) : impl_(std::move(m)) {}

  double potential(double r) const;
  double force(double r) const;
  double curvature(double r) const;

  /* closed interval on which the model may be evaluated */
  Range domain() const;
  PesKind kind() const;

 private:
  std::variant<PauliModel, RawTableModel, MorseModel, PolynomialModel> impl_;
};

PesModel morse_pes(double de, double alpha, double re);
PesModel harmonic_pes(double k, double r0, double v0 = 0.0);
PesModel constant_pes(double v0);
PesModel linear_pes(double force);
/* barrier*(((R-r_top)/half_width)^2 - 1)^2, minima at r_top -+ half_width */
PesModel double_well_pes(double barrier, double r_top, double half_width);
PesModel pauli_pes(const PauliCoefficientTable& table);
PesModel raw_table_pes(const RawPesTable& table);

struct PesTable {
  std::vector<double> potential;
  std::vector<double> force;
};

PesTable tabulate_pes(const PesModel& model, const PhaseSpaceGrid& grid);

}  // namespace kvn
