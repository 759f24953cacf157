#include "kvn/run.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "kvn/diagnostics.hpp"
#include "kvn/error.hpp"
#include "kvn/oracles.hpp"
#include "kvn/propagator.hpp"
#include "kvn/tst.hpp"
#include "kvn/units.hpp"
#include "kvn/vdos.hpp"

#ifndef KVN_VERSION
#define KVN_VERSION "0.0.0"
#endif

namespace kvn {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

/* every file goes through here so the manifest can list it */
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    f << content;
    if (!f) throw Error("write failed for " + (dir_ / name).string());
    files_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }

  const json& files() const { return files_; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f["file"].get<std::string>());
    return out;
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  json files_ = json::array();
};

struct ModeResult {
  json grid;
  json derived = json::object();
  json results = json::object();
  int exit_code = kExitOk;
};

std::string g10(double x) { return fmt::format("{:.10g}", x); }

GridPtr make_grid(const RunConfig& c) {
  const double pm = c.grid_p_max();
  return build_grid(c.n_r, c.n_p, {c.r_min, c.r_max}, {-pm, pm});
}

json grid_json(const PhaseSpaceGrid& g) {
  return {{"n_R", g.n_r_qubits()}, {"n_P", g.n_p_qubits()},
          {"R_min", g.r_min()},    {"R_max", g.r_max()},
          {"P_min", g.p_min()},    {"P_max", g.p_max()},
          {"dR", g.dr()},          {"dP", g.dp()}};
}

PesModel load_pes(const RunConfig& c) {
  if (c.pes_kind == "pauli_table") return pauli_pes(load_pauli_table_file(c.pes_path));
  if (c.pes_kind == "raw_table") return raw_table_pes(load_raw_table_file(c.pes_path));
  return morse_pes(c.morse_de, c.morse_alpha, c.morse_re);
}

std::string density_csv(const PhaseSpaceGrid& g, std::span<const double> rho) {
  std::string s = "R_angstrom,P_au,density\n";
  s.reserve(g.size() * 40);
  for (std::size_t j = 0; j < g.size_r(); ++j)
    for (std::size_t l = 0; l < g.size_p(); ++l)
      s += fmt::format("{},{},{}\n", g10(units::bohr_to_angstrom(g.r()[j])), g10(g.p()[l]),
                       g10(rho[g.index(j, l)]));
  return s;
}

json langevin_json(const LangevinParams& p) {
  return {{"s", p.s()},
          {"T_int_kelvin", units::hartree_to_kelvin(p.t_int)},
          {"T_int_hartree", p.t_int},
          {"sigma_H_au", p.sigma_h}};
}

ModeResult run_relax(const RunConfig& c, OutputSet& out, std::ostream& log) {
  ModeResult m;
  const auto params = make_langevin_params(c.mass, c.gamma, c.dt, c.t_phys, c.correction);
  const auto grid = make_grid(c);
  const auto pes = load_pes(c);
  m.grid = grid_json(*grid);
  m.derived = langevin_json(params);

  std::map<int, double> snaps;
  for (double t : c.snapshot_times) {
    const int n = static_cast<int>(std::lround(t / c.dt));
    if (n <= c.n_steps) snaps[n] = t;
  }
  json snap_list = json::array();
  auto on_step = [&](int n, const KvnState& s) {
    auto it = snaps.find(n);
    if (it == snaps.end()) return;
    const std::string name = fmt::format("density_{:.2f}fs.csv", units::au_to_fs(n * c.dt));
    out.write(name, density_csv(*grid, density(s)));
    snap_list.push_back({{"file", name}, {"step", n}, {"time_fs", units::au_to_fs(n * c.dt)}});
  };

  log << fmt::format("relax: {}x{} grid, s = {:.4g}, T_int = {:.2f} K, sigma_H = {:.6g}\n",
                     grid->size_r(), grid->size_p(), params.s(), units::hartree_to_kelvin(params.t_int),
                     params.sigma_h);
  auto init = encode_gaussian(grid, c.r0, c.p0, c.sigma_r, c.sigma_p);
  const auto res = relax(std::move(init), pes, params, c.n_steps, c.record_every, on_step);

  std::string trace = "time_fs,mean_R_angstrom,T_kin_K,D_KL_nats,cum_success_prob\n";
  for (const auto& r : res.trace)
    trace += fmt::format("{},{},{},{},{}\n", g10(units::au_to_fs(r.time)),
                         g10(units::bohr_to_angstrom(r.mean_r)), g10(units::hartree_to_kelvin(r.t_kin)),
                         g10(r.d_kl), g10(r.cum_success));
  out.write("trace.csv", trace);

  const auto& last = res.trace.back();
  log << fmt::format("relax: step {} t = {:.2f} fs <R> = {:.4f} A T_kin = {:.1f} K D_KL = {:.4g} nats\n",
                     last.step, units::au_to_fs(last.time), units::bohr_to_angstrom(last.mean_r),
                     units::hartree_to_kelvin(last.t_kin), last.d_kl);
  m.results = {{"steps_done", res.steps_done},
               {"final_mean_R_angstrom", units::bohr_to_angstrom(last.mean_r)},
               {"final_T_kin_kelvin", units::hartree_to_kelvin(last.t_kin)},
               {"initial_D_KL_nats", res.trace.front().d_kl},
               {"final_D_KL_nats", last.d_kl},
               {"cum_success_prob", last.cum_success},
               {"max_friction_correction", res.max_friction_correction},
               {"boundary_leak_steps", res.boundary_leak_steps},
               {"snapshots", snap_list}};
  if (res.boundary_leak_steps > 0)
    log << fmt::format("relax: warning: {} steps leaked norm through the momentum boundary\n",
                       res.boundary_leak_steps);
  if (!res.failure.empty()) {
    log << "relax: stopped: " << res.failure << "\n";
    m.results["failure"] = res.failure;
    m.exit_code = kExitNumerical;
  }
  return m;
}

/* smallest power-of-two split of tau keeping dt*omega <= 0.05 */
int aimd_samples_per_tau(double omega, double tau) {
  int l = 16;
  while (omega * tau / l > 0.05) l *= 2;
  return l;
}

ModeResult run_vdos(const RunConfig& c, OutputSet& out, std::ostream& log) {
  ModeResult m;
  const auto grid = make_grid(c);
  const auto pes = load_pes(c);
  m.grid = grid_json(*grid);

  const auto eq = analytic_canonical_state(grid, pes, c.mass, c.vdos_t);
  const double w_ref = c.omega_ref ? *c.omega_ref : reference_frequency(pes, *grid, c.mass);
  const double tau = c.tau ? *c.tau : default_qpe_tau(w_ref);
  const int sub = c.trotter_substeps ? *c.trotter_substeps : default_trotter_substeps(w_ref, tau);
  auto br = prepare_branch_states(eq, w_ref, c.mass);

  QpeConfig q;
  q.ancillas = c.ancillas;
  q.tau = tau;
  q.omega_shift = c.omega_shift;
  q.trotter_substeps = sub;
  q.validate();
  const double total_w = br.weight_plus + br.weight_minus;
  m.derived = {{"omega_ref_cm1", units::au_to_wavenumber(w_ref)},
               {"tau_au", tau},
               {"trotter_substeps", sub},
               {"bins", q.bins()},
               {"bin_width_cm1", units::au_to_wavenumber(q.bin_width())},
               {"window_cm1", units::au_to_wavenumber(q.window())},
               {"omega_shift_cm1", units::au_to_wavenumber(q.omega_shift)}};
  log << fmt::format("vdos: {}x{} grid, omega_ref = {:.2f} cm-1, tau = {:.4f} au, {} substeps, bin width {:.2f} cm-1\n",
                     grid->size_r(), grid->size_p(), units::au_to_wavenumber(w_ref), tau, sub,
                     units::au_to_wavenumber(q.bin_width()));

  std::vector<SpectrumResult> spectra;
  if (c.branch != BranchSelection::Minus) {
    q.branch = Branch::Plus;
    spectra.push_back(qpe_spectrum(br.plus, pes, c.mass, q));
    spectra.back().branch_weight = br.weight_plus;
  }
  if (c.branch != BranchSelection::Plus) {
    q.branch = Branch::Minus;
    spectra.push_back(qpe_spectrum(br.minus, pes, c.mass, q));
    spectra.back().branch_weight = br.weight_minus;
  }

  std::string csv = "omega_cm1,prob,branch\n";
  json branches = json::array();
  for (const auto& s : spectra) {
    q.branch = s.branch;
    for (std::size_t j = 0; j < s.probability.size(); ++j)
      csv += fmt::format("{},{},{}\n", g10(units::au_to_wavenumber(display_frequency(q, j, s.branch))),
                         g10(s.probability[j]), branch_name(s.branch));
    const std::size_t pk = s.branch == Branch::Plus ? s.peak_bin(q.bins() / 2) : s.peak_bin();
    const double pk_cm = units::au_to_wavenumber(display_frequency(q, pk, s.branch));
    branches.push_back({{"branch", branch_name(s.branch)},
                        {"weight", s.branch_weight},
                        {"postselection_yield", s.branch_weight / total_w},
                        {"peak_bin", pk},
                        {"peak_cm1", pk_cm}});
    log << fmt::format("vdos: {} branch weight {:.6g}, peak bin {} at {:.2f} cm-1\n", branch_name(s.branch),
                       s.branch_weight, pk, pk_cm);
  }
  out.write("spectrum.csv", csv);
  m.results["branches"] = branches;

  if (c.aimd_n_traj > 0) {
    const int L = aimd_samples_per_tau(w_ref, tau);
    const double sdt = tau / L;
    const auto samples =
        canonical_sampler(pes, c.mass, c.vdos_t, static_cast<std::size_t>(c.aimd_n_traj), c.seed,
                          {grid->r_min(), grid->r_max()});
    if (samples.warning)
      log << fmt::format("vdos: warning: sampler acceptance {:.3f}\n", samples.acceptance_rate);
    const auto ens = verlet_ensemble(pes, c.mass, samples.samples, sdt,
                                     L * static_cast<int>(q.bins()), 1, c.seed);
    q.branch = Branch::Plus;
    const auto ref = aimd_reference_spectrum(ens, c.window, q);
    std::string rcsv = "omega_cm1,prob\n";
    for (std::size_t j = 0; j < ref.probability.size(); ++j)
      rcsv += fmt::format("{},{}\n", g10(units::au_to_wavenumber(display_frequency(q, j, Branch::Plus))),
                          g10(ref.probability[j]));
    out.write("aimd_reference.csv", rcsv);
    const std::size_t pk = ref.peak_bin(q.bins() / 2);
    const double pk_cm = units::au_to_wavenumber(display_frequency(q, pk, Branch::Plus));
    json aimd = {{"n_traj", c.aimd_n_traj},
                 {"sample_dt_au", sdt},
                 {"samples", L * q.bins()},
                 {"window", c.window == WindowKind::Hann ? "hann" : "rect"},
                 {"sampler_acceptance", samples.acceptance_rate},
                 {"peak_bin", pk},
                 {"peak_cm1", pk_cm}};
    log << fmt::format("vdos: aimd reference peak bin {} at {:.2f} cm-1\n", pk, pk_cm);
    for (const auto& s : spectra)
      if (s.branch == Branch::Plus) {
        const bool same = s.peak_bin(q.bins() / 2) == pk;
        aimd["plus_peak_agrees"] = same;
        log << fmt::format("vdos: plus-branch peak {} the aimd reference\n", same ? "matches" : "differs from");
      }
    m.results["aimd_reference"] = aimd;
  }
  return m;
}

ModeResult run_tst(const RunConfig& c, OutputSet& out, std::ostream& log) {
  ModeResult m;
  const auto grid = make_grid(c);
  const auto pes = load_pes(c);
  m.grid = grid_json(*grid);
  TstConfig t{c.r_dagger, c.tst_sigma, c.temperatures};
  const double sigma = c.tst_sigma > 0.0 ? c.tst_sigma : 2.0 * grid->dr();
  m.derived = {{"R_dagger_bohr", c.r_dagger}, {"sigma_bohr", sigma}};

  const auto fit = arrhenius_sweep(grid, pes, c.mass, t);
  std::string csv = "T_kelvin,inv_T,flux_au,population,k_au,k_per_second,log_k\n";
  for (const auto& p : fit.points) {
    const double tk = units::hartree_to_kelvin(p.temperature);
    csv += fmt::format("{},{},{},{},{},{},{}\n", g10(tk), g10(1.0 / tk), g10(p.flux), g10(p.population),
                       g10(p.rate), g10(units::rate_au_to_per_second(p.rate)), g10(std::log(p.rate)));
    log << fmt::format("tst: T = {:.0f} K  k = {:.4e} au = {:.4e} s^-1\n", tk, p.rate,
                       units::rate_au_to_per_second(p.rate));
  }
  out.write("tst_rates.csv", csv);
  log << fmt::format("tst: Arrhenius E_a = {:.6g} hartree ({:.1f} K), ln A = {:.4f}\n", fit.activation_energy,
                     units::hartree_to_kelvin(fit.activation_energy), fit.log_prefactor);

  std::string ccsv = "T_kelvin,N_cross,k_cross,k_min\n";
  json crossings = json::array();
  for (double temp : c.temperatures) {
    const auto cr = crossing_reference(pes, c.mass, temp, c.cross_n_traj, c.cross_t_sim, c.cross_dt, c.seed, t,
                                       grid->r_min());
    const double tk = units::hartree_to_kelvin(temp);
    ccsv += fmt::format("{},{},{},{}\n", g10(tk), cr.n_cross, g10(cr.k_cross), g10(cr.k_min));
    crossings.push_back({{"T_kelvin", tk},
                         {"N_cross", cr.n_cross},
                         {"k_cross_au", cr.k_cross},
                         {"k_min_au", cr.k_min},
                         {"floor_pinned", cr.floor_pinned()}});
    if (cr.floor_pinned())
      log << fmt::format("tst: T = {:.0f} K  no crossings, k_cross below detection floor {:.3e} au\n", tk,
                         cr.k_min);
    else
      log << fmt::format("tst: T = {:.0f} K  {} crossings, k_cross = {:.4e} au\n", tk, cr.n_cross, cr.k_cross);
  }
  out.write("crossing.csv", ccsv);
  m.results = {{"activation_energy_hartree", fit.activation_energy},
               {"log_prefactor", fit.log_prefactor},
               {"crossing", crossings}};
  return m;
}

ModeResult run_bias(const RunConfig& c, OutputSet& out, std::ostream& log) {
  ModeResult m;
  std::string csv = "s,measured,predicted,rel_error,steps,pass\n";
  json rows = json::array();
  for (double s : c.bias_s) {
    const auto params = make_langevin_params(c.mass, s / c.dt, c.dt, c.t_phys, c.correction);
    const double pm = c.bias_width * std::sqrt(c.mass * params.t_int);
    const PhaseSpaceGrid grid(3, c.bias_n_p, {c.r_min, c.r_max}, {-pm, pm});
    if (m.grid.is_null()) m.grid = grid_json(grid);
    const auto r = momentum_bias_experiment(grid, params, c.bias_max_steps);
    const double rel = std::abs(r.measured - r.leading_order) / r.leading_order;
    const bool pass = rel <= c.bias_tolerance;
    csv += fmt::format("{},{},{},{},{},{}\n", g10(s), g10(r.measured), g10(r.leading_order), g10(rel), r.steps,
                       pass ? "PASS" : "FAIL");
    log << fmt::format("bias-check: s = {:g}  measured = {:.6g}  predicted 1/2 tanh s = {:.6g}  rel err = {:.2f}%  {}\n",
                       s, r.measured, r.leading_order, 100.0 * rel, pass ? "PASS" : "FAIL");
    rows.push_back({{"s", s},
                    {"measured", r.measured},
                    {"predicted", r.leading_order},
                    {"rel_error", rel},
                    {"steps", r.steps},
                    {"T_int_hartree", params.t_int},
                    {"sigma_H_au", params.sigma_h},
                    {"pass", pass}});
  }
  out.write("bias.csv", csv);
  m.results["bias"] = rows;
  return m;
}

ModeResult run_oracle(const RunConfig& c, OutputSet& out, std::ostream& log) {
  ModeResult m;
  const auto params = make_langevin_params(c.mass, c.gamma, c.dt, c.t_phys, c.correction);
  const auto grid = make_grid(c);
  const auto pes = load_pes(c);
  m.grid = grid_json(*grid);
  m.derived = langevin_json(params);

  auto init = encode_gaussian(grid, c.r0, c.p0, c.sigma_r, c.sigma_p);
  const auto res = relax(std::move(init), pes, params, c.n_steps, std::max(1, c.n_steps));
  if (!res.failure.empty()) {
    log << "oracle: KvN run stopped: " << res.failure << "\n";
    m.results["failure"] = res.failure;
    m.exit_code = kExitNumerical;
    return m;
  }
  const auto rho_kvn = density(res.final_state);

  std::vector<PhasePoint> start(static_cast<std::size_t>(c.oracle_particles));
  for (std::size_t i = 0; i < start.size(); ++i) {
    CounterRng rng(c.seed ^ 0x1a2b3c4dULL, i);
    start[i] = {c.r0 + c.sigma_r * rng.normal(), c.p0 + c.sigma_p * rng.normal()};
  }
  const auto ens = langevin_ensemble(pes, c.mass, c.gamma, c.t_phys, c.dt, c.n_steps, start, c.seed,
                                     std::max(1, c.n_steps));
  const auto pts = final_points(ens);
  const auto hist = histogram_density(pts, *grid);
  const double tv = total_variation(rho_kvn, hist, grid->cell_area());

  std::string csv = "R_angstrom,P_au,kvn_density,baoab_density\n";
  for (std::size_t j = 0; j < grid->size_r(); ++j)
    for (std::size_t l = 0; l < grid->size_p(); ++l)
      csv += fmt::format("{},{},{},{}\n", g10(units::bohr_to_angstrom(grid->r()[j])), g10(grid->p()[l]),
                         g10(rho_kvn[grid->index(j, l)]), g10(hist[grid->index(j, l)]));
  out.write("oracle_density.csv", csv);
  log << fmt::format("oracle: {} steps, {} particles, total variation {:.4f}\n", c.n_steps, c.oracle_particles,
                     tv);
  m.results = {{"total_variation", tv},
               {"n_particles", c.oracle_particles},
               {"steps", c.n_steps},
               {"kvn_T_kin_kelvin", units::hartree_to_kelvin(kinetic_temperature(res.final_state, c.mass))}};
  return m;
}

json config_json(const RunConfig& c) {
  auto list = [](const std::vector<double>& v, auto f) {
    json a = json::array();
    for (double x : v) a.push_back(f(x));
    return a;
  };
  json j;
  j["mode"] = mode_name(c.mode);
  j["seed"] = c.seed;
  j["output"] = {{"dir", c.out_dir}, {"snapshot_times_fs", list(c.snapshot_times, units::au_to_fs)}};
  j["system"] = {{"mass_au", c.mass}};
  j["grid"] = {{"n_R", c.n_r},
               {"n_P", c.n_p},
               {"R_min_angstrom", units::bohr_to_angstrom(c.r_min)},
               {"R_max_angstrom", units::bohr_to_angstrom(c.r_max)},
               {"P_max_au", c.grid_p_max()},
               {"P_width", c.p_width}};
  j["pes"] = {{"kind", c.pes_kind}, {"path", c.pes_path}};
  if (c.pes_kind == "morse") j["pes"]["morse"] = {{"De", c.morse_de}, {"alpha", c.morse_alpha}, {"Re", c.morse_re}};
  j["langevin"] = {{"gamma", c.gamma},
                   {"dt", c.dt},
                   {"T_phys_kelvin", units::hartree_to_kelvin(c.t_phys)},
                   {"correction", c.correction ? "on" : "off"},
                   {"n_steps", c.n_steps},
                   {"record_every", c.record_every},
                   {"s", c.gamma * c.dt},
                   {"T_int_kelvin", units::hartree_to_kelvin(c.t_int)},
                   {"sigma_H_au", c.sigma_h}};
  j["initial"] = {{"R0_angstrom", units::bohr_to_angstrom(c.r0)},
                  {"P0_au", c.p0},
                  {"sigma_R_bohr", c.sigma_r},
                  {"sigma_P_au", c.sigma_p}};
  j["vdos"] = {{"ancillas", c.ancillas},
               {"T_kelvin", units::hartree_to_kelvin(c.vdos_t)},
               {"omega_shift_cm1", units::au_to_wavenumber(c.omega_shift)},
               {"window", c.window == WindowKind::Hann ? "hann" : "rect"},
               {"branch", c.branch == BranchSelection::Both ? "both"
                          : c.branch == BranchSelection::Plus ? "plus"
                                                              : "minus"},
               {"aimd_n_traj", c.aimd_n_traj}};
  if (c.tau) j["vdos"]["tau_au"] = *c.tau;
  if (c.trotter_substeps) j["vdos"]["trotter_substeps"] = *c.trotter_substeps;
  if (c.omega_ref) j["vdos"]["omega_ref_cm1"] = units::au_to_wavenumber(*c.omega_ref);
  j["tst"] = {{"R_dagger_angstrom", units::bohr_to_angstrom(c.r_dagger)},
              {"sigma_angstrom", units::bohr_to_angstrom(c.tst_sigma)},
              {"temperatures_kelvin", list(c.temperatures, units::hartree_to_kelvin)},
              {"cross_n_traj", c.cross_n_traj},
              {"cross_t_sim_au", c.cross_t_sim},
              {"cross_dt_au", c.cross_dt}};
  j["bias"] = {{"s_values", c.bias_s},
               {"n_P", c.bias_n_p},
               {"P_width", c.bias_width},
               {"max_steps", c.bias_max_steps},
               {"tolerance", c.bias_tolerance}};
  j["oracle"] = {{"n_particles", c.oracle_particles}};
  return j;
}

json versions_json() {
  return {{"kvn", KVN_VERSION},
          {"compiler", __VERSION__},
          {"fftw", fftw_version_string()},
          {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
          {"fmt", FMT_VERSION},
          {"openssl", OpenSSL_version(OPENSSL_VERSION)},
#ifdef _OPENMP
          {"openmp", _OPENMP}
#else
          {"openmp", 0}
#endif
  };
}

}  // namespace

RunStatus run(const RunConfig& cfg, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputSet out(cfg.out_dir);
  ModeResult m;
  switch (cfg.mode) {
    case RunMode::Relax: m = run_relax(cfg, out, log); break;
    case RunMode::Vdos: m = run_vdos(cfg, out, log); break;
    case RunMode::Tst: m = run_tst(cfg, out, log); break;
    case RunMode::BiasCheck: m = run_bias(cfg, out, log); break;
    case RunMode::Oracle: m = run_oracle(cfg, out, log); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json man;
  man["config"] = config_json(cfg);
  man["derived"] = m.derived;
  man["grid"] = m.grid;
  man["results"] = m.results;
  man["versions"] = versions_json();
  man["wall_time_s"] = wall;
  man["exit_code"] = m.exit_code;
  man["outputs"] = out.files();
  {
    std::ofstream f(out.dir() / "manifest.json");
    f << man.dump(2) << "\n";
    if (!f) throw Error("cannot write manifest.json");
  }
  log << fmt::format("{}: wrote {} files to {} in {:.1f} s\n", mode_name(cfg.mode), out.files().size() + 1,
                     out.dir().string(), wall);
  RunStatus st;
  st.exit_code = m.exit_code;
  st.outputs = out.names();
  st.outputs.push_back("manifest.json");
  return st;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"KvN phase-space molecular dynamics"};
  std::string config_path, out_dir, mode, seed;
  app.add_option("--config", config_path, "config file")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "RNG seed (overrides seed)");
  app.add_option("--mode", mode, "relax, vdos, tst, bias-check or oracle (overrides mode)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto parsed = parse_config_file(config_path);
    if (!mode.empty()) parsed.entries["mode"] = {mode, 0};
    if (!seed.empty()) parsed.entries["seed"] = {seed, 0};
    if (!out_dir.empty()) parsed.entries["output.dir"] = {out_dir, 0};
    const auto cfg = validate(parsed);
    return run(cfg, std::cout).exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace kvn
