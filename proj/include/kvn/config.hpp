#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kvn/vdos.hpp"

namespace kvn {

/* flat "section.key" -> value, as written */
struct ParsedConfig {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries;
};

/*
 * Syntax: `key = value` lines, `[section]` headers prefixing following keys
 * with "section.", `#` comments, lists comma separated.
 */
ParsedConfig parse_config(std::istream& in);
ParsedConfig parse_config_file(const std::string& path);

enum class RunMode { Relax, Vdos, Tst, BiasCheck, Oracle };
const char* mode_name(RunMode m);

enum class BranchSelection { Plus, Minus, Both };

/* everything resolved to atomic units (temperatures in hartree) */
struct RunConfig {
  RunMode mode = RunMode::Relax;
  std::uint64_t seed = 20240611;
  std::string out_dir = "out";

  double mass = 0.0;

  int n_r = 7;
  int n_p = 7;
  double r_min = 0.0, r_max = 0.0;
  /* unset: symmetric 6 sqrt(mu T) with the mode's reference temperature */
  std::optional<double> p_max;
  double p_width = 6.0;

  std::string pes_kind = "pauli_table";
  std::string pes_path;
  double morse_de = 0.0, morse_alpha = 0.0, morse_re = 0.0;

  double gamma = 0.0, dt = 0.0, t_phys = 0.0;
  bool correction = true;
  int n_steps = 0;
  int record_every = 0;
  double t_int = 0.0, sigma_h = 0.0;

  double r0 = 0.0, p0 = 0.0, sigma_r = 0.0, sigma_p = 0.0;
  std::vector<double> snapshot_times;

  int ancillas = 7;
  std::optional<double> tau;
  std::optional<int> trotter_substeps;
  std::optional<double> omega_ref;
  double omega_shift = 0.0;
  double vdos_t = 0.0;
  WindowKind window = WindowKind::Hann;
  BranchSelection branch = BranchSelection::Both;
  int aimd_n_traj = 256;

  double r_dagger = 0.0;
  double tst_sigma = 0.0;
  std::vector<double> temperatures;
  int cross_n_traj = 1024;
  double cross_t_sim = 2000.0;
  double cross_dt = 0.5;

  std::vector<double> bias_s;
  int bias_n_p = 10;
  double bias_width = 8.0;
  int bias_max_steps = 200000;
  double bias_tolerance = 0.1;

  int oracle_particles = 100000;

  /* reference temperature for the default P window */
  double grid_temperature() const;
  double grid_p_max() const;
};

/* checks every key, collects all problems, throws one ConfigError listing them */
RunConfig validate(const ParsedConfig& parsed);

}  // namespace kvn
