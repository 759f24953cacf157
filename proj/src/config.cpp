#include "kvn/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "kvn/error.hpp"
#include "kvn/propagator.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("expected an unsigned integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected on/off, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma separated list");
  return out;
}

int to_qubits(const std::string& v) {
  const long long q = to_int(v);
  if (q < 3 || q > 14) throw ConfigError("qubit count must be in [3, 14]");
  return static_cast<int>(q);
}

}  // namespace

ParsedConfig parse_config(std::istream& in) {
  ParsedConfig out;
  std::string line, section;
  int lineno = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        errors.push_back(fmt::format("line {}: malformed section header", lineno));
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back(fmt::format("line {}: expected 'key = value'", lineno));
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      errors.push_back(fmt::format("line {}: empty key", lineno));
      continue;
    }
    if (!section.empty()) key = section + "." + key;
    if (out.entries.count(key)) {
      errors.push_back(fmt::format("line {}: duplicate key '{}'", lineno, key));
      continue;
    }
    out.entries[key] = {value, lineno};
  }
  if (!errors.empty()) {
    std::string msg = "config syntax errors:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(f);
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::Relax: return "relax";
    case RunMode::Vdos: return "vdos";
    case RunMode::Tst: return "tst";
    case RunMode::BiasCheck: return "bias-check";
    case RunMode::Oracle: return "oracle";
  }
  return "?";
}

double RunConfig::grid_temperature() const {
  switch (mode) {
    case RunMode::Vdos: return vdos_t;
    case RunMode::Tst: return *std::max_element(temperatures.begin(), temperatures.end());
    default: return t_phys;
  }
}

double RunConfig::grid_p_max() const {
  return p_max ? *p_max : p_width * std::sqrt(mass * grid_temperature());
}

RunConfig validate(const ParsedConfig& parsed) {
  using units::angstrom_to_bohr;
  using units::kelvin_to_hartree;

  RunConfig c;
  c.mass = units::kH2ReducedMass;
  c.r_min = angstrom_to_bohr(0.3);
  c.r_max = angstrom_to_bohr(4.0);
  c.gamma = 0.02;
  c.dt = 0.5;
  c.t_phys = kelvin_to_hartree(947.0);
  c.n_steps = 4002;
  c.record_every = 20;
  c.r0 = angstrom_to_bohr(1.82);
  c.sigma_r = 0.4;
  c.sigma_p = 0.8;
  c.snapshot_times = {0.0, units::fs_to_au(1.0), units::fs_to_au(2.9), units::fs_to_au(10.0),
                      units::fs_to_au(25.0), units::fs_to_au(48.4)};
  c.vdos_t = kelvin_to_hartree(300.0);
  c.r_dagger = angstrom_to_bohr(2.5);
  c.temperatures = {kelvin_to_hartree(2500.0), kelvin_to_hartree(5000.0), kelvin_to_hartree(10000.0)};
  c.bias_s = {0.005, 0.01, 0.05};

  std::vector<std::string> errors;
  bool have_mode = false;

  auto positive = [](double x) {
    if (!(x > 0.0)) throw ConfigError("must be positive");
    return x;
  };
  auto positive_int = [](long long x) {
    if (x < 1) throw ConfigError("must be >= 1");
    return static_cast<int>(x);
  };

  using Handler = std::function<void(const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      {"mode",
       [&](const std::string& v) {
         if (v == "relax") c.mode = RunMode::Relax;
         else if (v == "vdos") c.mode = RunMode::Vdos;
         else if (v == "tst") c.mode = RunMode::Tst;
         else if (v == "bias-check") c.mode = RunMode::BiasCheck;
         else if (v == "oracle") c.mode = RunMode::Oracle;
         else throw ConfigError("unknown mode '" + v + "' (relax, vdos, tst, bias-check, oracle)");
         have_mode = true;
       }},
      {"seed", [&](const std::string& v) { c.seed = to_u64(v); }},
      {"output.dir", [&](const std::string& v) { c.out_dir = v; }},
      {"output.snapshot_times_fs",
       [&](const std::string& v) {
         c.snapshot_times.clear();
         if (v == "none") return;
         for (double t : to_list(v)) {
           if (t < 0.0) throw ConfigError("snapshot times must be >= 0");
           c.snapshot_times.push_back(units::fs_to_au(t));
         }
       }},
      {"system.mass_au", [&](const std::string& v) { c.mass = positive(to_double(v)); }},
      {"grid.n_R", [&](const std::string& v) { c.n_r = to_qubits(v); }},
      {"grid.n_P", [&](const std::string& v) { c.n_p = to_qubits(v); }},
      {"grid.R_min_angstrom", [&](const std::string& v) { c.r_min = angstrom_to_bohr(to_double(v)); }},
      {"grid.R_max_angstrom", [&](const std::string& v) { c.r_max = angstrom_to_bohr(to_double(v)); }},
      {"grid.P_max_au", [&](const std::string& v) { c.p_max = positive(to_double(v)); }},
      {"grid.P_width", [&](const std::string& v) { c.p_width = positive(to_double(v)); }},
      {"pes.kind",
       [&](const std::string& v) {
         if (v != "pauli_table" && v != "raw_table" && v != "morse")
           throw ConfigError("unknown kind '" + v + "' (pauli_table, raw_table, morse)");
         c.pes_kind = v;
       }},
      {"pes.path", [&](const std::string& v) { c.pes_path = v; }},
      {"pes.morse.De", [&](const std::string& v) { c.morse_de = positive(to_double(v)); }},
      {"pes.morse.alpha", [&](const std::string& v) { c.morse_alpha = positive(to_double(v)); }},
      {"pes.morse.Re", [&](const std::string& v) { c.morse_re = positive(to_double(v)); }},
      {"langevin.gamma", [&](const std::string& v) { c.gamma = positive(to_double(v)); }},
      {"langevin.dt", [&](const std::string& v) { c.dt = positive(to_double(v)); }},
      {"langevin.T_phys_kelvin",
       [&](const std::string& v) { c.t_phys = kelvin_to_hartree(positive(to_double(v))); }},
      {"langevin.correction", [&](const std::string& v) { c.correction = to_bool(v); }},
      {"langevin.n_steps",
       [&](const std::string& v) {
         const long long n = to_int(v);
         if (n < 0) throw ConfigError("must be >= 0");
         c.n_steps = static_cast<int>(n);
       }},
      {"langevin.record_every", [&](const std::string& v) { c.record_every = positive_int(to_int(v)); }},
      {"initial.R0_angstrom", [&](const std::string& v) { c.r0 = angstrom_to_bohr(to_double(v)); }},
      {"initial.P0_au", [&](const std::string& v) { c.p0 = to_double(v); }},
      {"initial.sigma_R_bohr", [&](const std::string& v) { c.sigma_r = positive(to_double(v)); }},
      {"initial.sigma_P_au", [&](const std::string& v) { c.sigma_p = positive(to_double(v)); }},
      {"vdos.ancillas",
       [&](const std::string& v) {
         const long long m = to_int(v);
         if (m < 1 || m > 12) throw ConfigError("must be in [1, 12]");
         c.ancillas = static_cast<int>(m);
       }},
      {"vdos.tau_au", [&](const std::string& v) { c.tau = positive(to_double(v)); }},
      {"vdos.trotter_substeps", [&](const std::string& v) { c.trotter_substeps = positive_int(to_int(v)); }},
      {"vdos.omega_ref_cm1",
       [&](const std::string& v) { c.omega_ref = units::wavenumber_to_au(positive(to_double(v))); }},
      {"vdos.omega_shift_cm1",
       [&](const std::string& v) { c.omega_shift = units::wavenumber_to_au(to_double(v)); }},
      {"vdos.T_kelvin", [&](const std::string& v) { c.vdos_t = kelvin_to_hartree(positive(to_double(v))); }},
      {"vdos.window",
       [&](const std::string& v) {
         if (v == "hann") c.window = WindowKind::Hann;
         else if (v == "rect") c.window = WindowKind::Rect;
         else throw ConfigError("expected hann or rect");
       }},
      {"vdos.branch",
       [&](const std::string& v) {
         if (v == "plus") c.branch = BranchSelection::Plus;
         else if (v == "minus") c.branch = BranchSelection::Minus;
         else if (v == "both") c.branch = BranchSelection::Both;
         else throw ConfigError("expected plus, minus or both");
       }},
      {"vdos.aimd_n_traj",
       [&](const std::string& v) {
         const long long n = to_int(v);
         if (n < 0) throw ConfigError("must be >= 0");
         c.aimd_n_traj = static_cast<int>(n);
       }},
      {"tst.R_dagger_angstrom", [&](const std::string& v) { c.r_dagger = angstrom_to_bohr(to_double(v)); }},
      {"tst.sigma_angstrom", [&](const std::string& v) { c.tst_sigma = angstrom_to_bohr(positive(to_double(v))); }},
      {"tst.temperatures_kelvin",
       [&](const std::string& v) {
         c.temperatures.clear();
         for (double t : to_list(v)) c.temperatures.push_back(kelvin_to_hartree(positive(t)));
       }},
      {"tst.cross_n_traj", [&](const std::string& v) { c.cross_n_traj = positive_int(to_int(v)); }},
      {"tst.cross_t_sim_au", [&](const std::string& v) { c.cross_t_sim = positive(to_double(v)); }},
      {"tst.cross_dt_au", [&](const std::string& v) { c.cross_dt = positive(to_double(v)); }},
      {"bias.s_values",
       [&](const std::string& v) {
         c.bias_s.clear();
         for (double s : to_list(v)) c.bias_s.push_back(positive(s));
       }},
      {"bias.n_P", [&](const std::string& v) { c.bias_n_p = to_qubits(v); }},
      {"bias.P_width", [&](const std::string& v) { c.bias_width = positive(to_double(v)); }},
      {"bias.max_steps", [&](const std::string& v) { c.bias_max_steps = positive_int(to_int(v)); }},
      {"bias.tolerance", [&](const std::string& v) { c.bias_tolerance = positive(to_double(v)); }},
      {"oracle.n_particles", [&](const std::string& v) { c.oracle_particles = positive_int(to_int(v)); }},
  };

  for (const auto& [key, entry] : parsed.entries) {
    auto it = handlers.find(key);
    if (it == handlers.end()) {
      errors.push_back(fmt::format("{} (line {}): unknown key", key, entry.line));
      continue;
    }
    try {
      it->second(entry.value);
    } catch (const ConfigError& e) {
      errors.push_back(fmt::format("{} (line {}): {}", key, entry.line, e.what()));
    }
  }

  if (!have_mode) errors.push_back("mode: required (relax, vdos, tst, bias-check, oracle)");
  if (!(c.r_min < c.r_max)) errors.push_back("grid.R_min_angstrom/grid.R_max_angstrom: range must be increasing");
  if (c.pes_kind == "pauli_table" || c.pes_kind == "raw_table") {
    if (c.pes_path.empty() && c.mode != RunMode::BiasCheck)
      errors.push_back("pes.path: required when pes.kind = " + c.pes_kind);
  } else if (c.pes_kind == "morse") {
    if (c.morse_de <= 0.0) errors.push_back("pes.morse.De: required when pes.kind = morse");
    if (c.morse_alpha <= 0.0) errors.push_back("pes.morse.alpha: required when pes.kind = morse");
    if (c.morse_re <= 0.0) errors.push_back("pes.morse.Re: required when pes.kind = morse");
  }
  if (c.mode == RunMode::Tst) {
    if (c.temperatures.size() < 3) errors.push_back("tst.temperatures_kelvin: at least 3 temperatures");
    if (!(c.r_dagger > c.r_min && c.r_dagger < c.r_max))
      errors.push_back("tst.R_dagger_angstrom: dividing surface must lie inside the R range");
  }
  if (c.mode == RunMode::Relax || c.mode == RunMode::Oracle) {
    if (c.r0 < c.r_min || c.r0 >= c.r_max) errors.push_back("initial.R0_angstrom: outside the R range");
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  const LangevinParams lp = make_langevin_params(c.mass, c.gamma, c.dt, c.t_phys, c.correction);
  c.t_int = lp.t_int;
  c.sigma_h = lp.sigma_h;
  return c;
}

}  // namespace kvn
