#include "kvn/tst.hpp"

#include <fmt/format.h>

#include <cmath>
#include <vector>

#include "kvn/diagnostics.hpp"
#include "kvn/error.hpp"
#include "kvn/oracles.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace {

constexpr double kDeltaMassTolerance = 0.01;

void check_surface(const PhaseSpaceGrid& g, const TstConfig& cfg) {
  if (!(cfg.r_dagger > g.r_min() && cfg.r_dagger < g.r_max()))
    throw ConfigError(fmt::format("dividing surface R = {} bohr outside grid ({}, {})", cfg.r_dagger,
                                  g.r_min(), g.r_max()));
}

double effective_sigma(const PhaseSpaceGrid& g, const TstConfig& cfg) {
  const double s = cfg.sigma > 0.0 ? cfg.sigma : 2.0 * g.dr();
  if (s < g.dr() * (1.0 - 1e-12))
    throw ResolutionError(fmt::format("delta width {} below grid spacing {}", s, g.dr()));
  return s;
}

}  // namespace

KvnState analytic_canonical_state(GridPtr grid, const PesModel& pes, double mass, double temperature) {
  const auto rho = canonical_reference(*grid, pes, mass, temperature);
  KvnState s(std::move(grid), Basis::RP);
  auto a = s.amplitudes();
  for (std::size_t i = 0; i < rho.size(); ++i) a[i] = std::sqrt(rho[i]);
  return s;
}

std::vector<double> smoothed_delta(const PhaseSpaceGrid& g, double r_dagger, double sigma) {
  std::vector<double> d(g.size_r());
  double mass = 0.0;
  const double norm = 1.0 / std::sqrt(2.0 * units::kPi * sigma * sigma);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double x = g.r()[j] - r_dagger;
    d[j] = norm * std::exp(-x * x / (2.0 * sigma * sigma));
    mass += d[j] * g.dr();
  }
  if (std::abs(mass - 1.0) > kDeltaMassTolerance)
    throw ResolutionError(fmt::format("smoothed delta has grid mass {:.4f}; surface too close to the edge "
                                      "or width unresolved",
                                      mass));
  for (double& x : d) x /= mass;
  return d;
}

double tst_flux(const KvnState& state, double mass, const TstConfig& cfg) {
  const auto& g = state.grid();
  check_surface(g, cfg);
  const auto delta = smoothed_delta(g, cfg.r_dagger, effective_sigma(g, cfg));
  const auto rho = density(state);
  const double norm = state.norm_squared();
  double flux = 0.0;
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    if (delta[j] == 0.0) continue;
    double row = 0.0;
    for (std::size_t l = 0; l < g.size_p(); ++l)
      if (g.p()[l] > 0.0) row += g.p()[l] / mass * rho[g.index(j, l)];
    flux += delta[j] * row;
  }
  return flux * g.cell_area() / norm;
}

double reactant_population(const KvnState& state, const TstConfig& cfg) {
  const auto& g = state.grid();
  check_surface(g, cfg);
  const auto rho = density(state);
  double pr = 0.0, total = 0.0;
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    double row = 0.0;
    for (std::size_t l = 0; l < g.size_p(); ++l) row += rho[g.index(j, l)];
    total += row;
    if (g.r()[j] < cfg.r_dagger) pr += row;
  }
  return pr / total;
}

ArrheniusFit arrhenius_sweep(GridPtr grid, const PesModel& pes, double mass, const TstConfig& cfg) {
  if (cfg.temperatures.size() < 3) throw ConfigError("arrhenius_sweep needs at least 3 temperatures");
  ArrheniusFit fit;
  for (double t : cfg.temperatures) {
    if (!(t > 0.0)) throw ConfigError("temperatures must be positive");
    const KvnState s = analytic_canonical_state(grid, pes, mass, t);
    TstPoint p;
    p.temperature = t;
    p.flux = tst_flux(s, mass, cfg);
    p.population = reactant_population(s, cfg);
    if (!(p.population > 0.0)) throw NumericalError("reactant population is zero");
    p.rate = p.flux / p.population;
    if (!(p.rate > 0.0)) throw NumericalError(fmt::format("non-positive TST rate at T = {} Eh", t));
    fit.points.push_back(p);
  }
  /* least squares ln k = ln A - E_a * beta */
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(fit.points.size());
  for (const auto& p : fit.points) {
    const double x = 1.0 / p.temperature, y = std::log(p.rate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.activation_energy = -slope;
  fit.log_prefactor = (sy - slope * sx) / n;
  return fit;
}

CrossingResult crossing_reference(const PesModel& pes, double mass, double temperature, int n_traj,
                                  double t_sim, double dt, std::uint64_t seed, const TstConfig& cfg,
                                  double r_lo) {
  if (n_traj < 1 || !(t_sim > 0.0) || !(dt > 0.0)) throw ConfigError("crossing_reference: bad budget");
  if (!(r_lo < cfg.r_dagger)) throw ConfigError("crossing_reference: empty reactant region");
  const auto init = canonical_sampler(pes, mass, temperature, static_cast<std::size_t>(n_traj), seed,
                                      {r_lo, cfg.r_dagger});
  const int n_steps = static_cast<int>(std::ceil(t_sim / dt));
  std::vector<long> counts(n_traj, 0);
  const Range dom = pes.domain();
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n_traj; ++i) {
    double r = init.samples[i].r, p = init.samples[i].p;
    double f = pes.force(r);
    long c = 0;
    for (int s = 0; s < n_steps; ++s) {
      const double before = r;
      p += 0.5 * dt * f;
      r += dt * p / mass;
      /* leaving a tabulated model counts as the last event of the trajectory */
      if (r < dom.lo || r > dom.hi) {
        if (before < cfg.r_dagger && r >= cfg.r_dagger) ++c;
        break;
      }
      f = pes.force(r);
      p += 0.5 * dt * f;
      if (before < cfg.r_dagger && r >= cfg.r_dagger) ++c;
    }
    counts[i] = c;
  }
  CrossingResult out;
  for (long c : counts) out.n_cross += c;
  out.n_traj = n_traj;
  out.t_sim = n_steps * dt;
  const double budget = static_cast<double>(n_traj) * out.t_sim;
  out.k_cross = static_cast<double>(out.n_cross) / budget;
  out.k_min = 1.0 / budget;
  return out;
}

}  // namespace kvn
