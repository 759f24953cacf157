#include "kvn/electronic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "kvn/error.hpp"

namespace kvn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, std::size_t line) {
  const std::string t = trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(fmt::format("line {}: cannot parse number '{}'", line, t));
  if (!std::isfinite(v)) throw ConfigError(fmt::format("line {}: non-finite value", line));
  return v;
}

/* '#' lines and blank lines are skipped; the first other line must equal header */
std::vector<std::vector<double>> read_csv(std::istream& in, const std::string& header) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  const std::size_t ncol =
      static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  std::vector<std::vector<double>> cols(ncol);
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!seen_header) {
      std::string compact;
      for (char ch : t)
        if (ch != ' ' && ch != '\t') compact += ch;
      if (compact != header)
        throw ConfigError(fmt::format("line {}: expected header '{}'", lineno, header));
      seen_header = true;
      continue;
    }
    std::stringstream ss(t);
    std::string field;
    std::size_t k = 0;
    while (std::getline(ss, field, ',')) {
      if (k >= ncol) throw ConfigError(fmt::format("line {}: too many fields", lineno));
      cols[k++].push_back(parse_double(field, lineno));
    }
    if (k != ncol) throw ConfigError(fmt::format("line {}: expected {} fields", lineno, ncol));
  }
  if (!seen_header) throw ConfigError("missing header '" + header + "'");
  if (cols[0].size() < kMinTableRows)
    throw ConfigError(fmt::format("table has {} rows, need >= {} samples", cols[0].size(),
                                  kMinTableRows));
  for (std::size_t i = 1; i < cols[0].size(); ++i)
    if (!(cols[0][i] > cols[0][i - 1]))
      throw ConfigError(fmt::format("R column not strictly increasing at row {}", i + 1));
  return cols;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open PES table '" + path + "'");
  return f;
}

template <class>
inline constexpr bool kAlwaysFalse = false;

}  // namespace

PauliCoefficientTable load_pauli_table(std::istream& in) {
  auto cols = read_csv(in, "R_bohr,a_hartree,b_hartree,c_hartree");
  return {std::move(cols[0]), std::move(cols[1]), std::move(cols[2]), std::move(cols[3])};
}

void write_pauli_table(std::ostream& out, const PauliCoefficientTable& t) {
  out << "R_bohr,a_hartree,b_hartree,c_hartree\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << fmt::format("{},{},{},{}\n", t.r[i], t.a[i], t.b[i], t.c[i]);
}

RawPesTable load_raw_table(std::istream& in) {
  auto cols = read_csv(in, "R_bohr,V_hartree");
  return {std::move(cols[0]), std::move(cols[1])};
}

PauliCoefficientTable load_pauli_table_file(const std::string& path) {
  auto f = open_or_throw(path);
  return load_pauli_table(f);
}

RawPesTable load_raw_table_file(const std::string& path) {
  auto f = open_or_throw(path);
  return load_raw_table(f);
}

PauliModel::PauliModel(const PauliCoefficientTable& t)
    : a_(t.r, t.a), b_(t.r, t.b), c_(t.r, t.c) {}

void PauliModel::check_domain(double r) const {
  if (!(r >= r_min() && r <= r_max()))
    throw DomainError(fmt::format("R = {} bohr outside table span [{}, {}]", r, r_min(), r_max()));
}

double PauliModel::omega(double r) const {
  check_domain(r);
  return std::hypot(b_.value(r), c_.value(r));
}

double PauliModel::energy(double r) const {
  check_domain(r);
  return a_.value(r) - std::hypot(b_.value(r), c_.value(r));
}

double PauliModel::force(double r) const {
  check_domain(r);
  const double b = b_.value(r), c = c_.value(r);
  const double om = std::hypot(b, c);
  if (om <= kOmegaEpsilon)
    throw SingularityError(fmt::format("Omega(R) = {} at R = {}: level degeneracy", om, r));
  return -a_.derivative(r) + (b * b_.derivative(r) + c * c_.derivative(r)) / om;
}

double PauliModel::curvature(double r) const {
  check_domain(r);
  const double b = b_.value(r), c = c_.value(r);
  const double db = b_.derivative(r), dc = c_.derivative(r);
  const double om = std::hypot(b, c);
  if (om <= kOmegaEpsilon)
    throw SingularityError(fmt::format("Omega(R) = {} at R = {}: level degeneracy", om, r));
  const double s = b * db + c * dc;
  const double d2om =
      (db * db + b * b_.second_derivative(r) + dc * dc + c * c_.second_derivative(r)) / om -
      s * s / (om * om * om);
  return a_.second_derivative(r) - d2om;
}

double ground_state_energy(const PauliCoefficientTable& table, double r) {
  return PauliModel(table).energy(r);
}

double hf_force(const PauliCoefficientTable& table, double r) { return PauliModel(table).force(r); }

RawTableModel::RawTableModel(const RawPesTable& t) : v_(t.r, t.v) {}

void RawTableModel::check_domain(double r) const {
  if (!(r >= r_min() && r <= r_max()))
    throw DomainError(fmt::format("R = {} bohr outside table span [{}, {}]", r, r_min(), r_max()));
}

double RawTableModel::energy(double r) const {
  check_domain(r);
  return v_.value(r);
}
double RawTableModel::force(double r) const {
  check_domain(r);
  return -v_.derivative(r);
}
double RawTableModel::curvature(double r) const {
  check_domain(r);
  return v_.second_derivative(r);
}

const char* pes_kind_name(PesKind k) {
  switch (k) {
    case PesKind::PauliTable: return "pauli_table";
    case PesKind::RawTable: return "raw_table";
    case PesKind::Morse: return "morse";
    case PesKind::Polynomial: return "polynomial";
  }
  return "?";
}

double PesModel::potential(double r) const {
  return std::visit(
      [r](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MorseModel>) {
          const double e = 1.0 - std::exp(-m.alpha * (r - m.re));
          return m.de * e * e;
        } else if constexpr (std::is_same_v<T, PolynomialModel>) {
          double v = 0.0;
          const double x = r - m.center;
          for (auto it = m.coeff.rbegin(); it != m.coeff.rend(); ++it) v = v * x + *it;
          return v;
        } else {
          return m.energy(r);
        }
      },
      impl_);
}

double PesModel::force(double r) const {
  return std::visit(
      [r](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MorseModel>) {
          const double e = std::exp(-m.alpha * (r - m.re));
          return -2.0 * m.de * m.alpha * (1.0 - e) * e;
        } else if constexpr (std::is_same_v<T, PolynomialModel>) {
          double d = 0.0;
          const double x = r - m.center;
          for (std::size_t n = m.coeff.size(); n-- > 1;) d = d * x + static_cast<double>(n) * m.coeff[n];
          return -d;
        } else {
          return m.force(r);
        }
      },
      impl_);
}

double PesModel::curvature(double r) const {
  return std::visit(
      [r](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MorseModel>) {
          const double e = std::exp(-m.alpha * (r - m.re));
          return 2.0 * m.de * m.alpha * m.alpha * e * (2.0 * e - 1.0);
        } else if constexpr (std::is_same_v<T, PolynomialModel>) {
          double d2 = 0.0;
          const double x = r - m.center;
          for (std::size_t n = m.coeff.size(); n-- > 2;)
            d2 = d2 * x + static_cast<double>(n * (n - 1)) * m.coeff[n];
          return d2;
        } else {
          return m.curvature(r);
        }
      },
      impl_);
}

Range PesModel::domain() const {
  return std::visit(
      [](const auto& m) -> Range {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PauliModel> || std::is_same_v<T, RawTableModel>)
          return {m.r_min(), m.r_max()};
        else
          return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      },
      impl_);
}

PesKind PesModel::kind() const {
  return std::visit(
      [](const auto& m) -> PesKind {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PauliModel>) return PesKind::PauliTable;
        else if constexpr (std::is_same_v<T, RawTableModel>) return PesKind::RawTable;
        else if constexpr (std::is_same_v<T, MorseModel>) return PesKind::Morse;
        else if constexpr (std::is_same_v<T, PolynomialModel>) return PesKind::Polynomial;
        else static_assert(kAlwaysFalse<T>);
      },
      impl_);
}

PesModel morse_pes(double de, double alpha, double re) {
  if (!(de > 0.0) || !(alpha > 0.0) || !(re > 0.0))
    throw ConfigError("morse parameters De, alpha, Re must all be positive");
  return PesModel(MorseModel{de, alpha, re});
}

PesModel harmonic_pes(double k, double r0, double v0) {
  return PesModel(PolynomialModel{{v0, 0.0, 0.5 * k}, r0});
}

PesModel constant_pes(double v0) { return PesModel(PolynomialModel{{v0}, 0.0}); }

PesModel linear_pes(double force) { return PesModel(PolynomialModel{{0.0, -force}, 0.0}); }

PesModel double_well_pes(double barrier, double r_top, double half_width) {
  const double w2 = half_width * half_width;
  return PesModel(PolynomialModel{{barrier, 0.0, -2.0 * barrier / w2, 0.0, barrier / (w2 * w2)}, r_top});
}

PesModel pauli_pes(const PauliCoefficientTable& table) { return PesModel(PauliModel(table)); }

PesModel raw_table_pes(const RawPesTable& table) { return PesModel(RawTableModel(table)); }

PesTable tabulate_pes(const PesModel& model, const PhaseSpaceGrid& grid) {
  const Range d = model.domain();
  if (grid.r_min() < d.lo || grid.r_max() > d.hi)
    throw DomainError(fmt::format("grid R range [{}, {}] not inside PES domain [{}, {}]", grid.r_min(),
                                  grid.r_max(), d.lo, d.hi));
  PesTable t;
  t.potential.resize(grid.size_r());
  t.force.resize(grid.size_r());
  for (std::size_t j = 0; j < grid.size_r(); ++j) {
    t.potential[j] = model.potential(grid.r()[j]);
    t.force[j] = model.force(grid.r()[j]);
  }
  return t;
}

}  // namespace kvn
