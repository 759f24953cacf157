#include "kvn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kvn/error.hpp"

namespace kvn {

double mean_r(const PhaseSpaceGrid& g, std::span<const double> rho) {
  const auto m = r_marginal(g, rho);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    num += g.r()[j] * m[j];
    den += m[j];
  }
  return num / den;
}

double kinetic_temperature(const PhaseSpaceGrid& g, std::span<const double> rho, double mass) {
  const auto m = p_marginal(g, rho);
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l) {
    num += g.p()[l] * g.p()[l] * m[l];
    den += m[l];
  }
  return num / den / mass;
}

double mean_r(const KvnState& s) { return mean_r(s.grid(), density(s)); }

double mean_p(const KvnState& s) {
  const auto m = p_marginal(s.grid(), density(s));
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l) {
    num += s.grid().p()[l] * m[l];
    den += m[l];
  }
  return num / den;
}

double kinetic_temperature(const KvnState& s, double mass) {
  return kinetic_temperature(s.grid(), density(s), mass);
}

double mean_energy(const KvnState& s, const PesModel& pes, double mass) {
  const auto& g = s.grid();
  const auto rho = density(s);
  const auto mr = r_marginal(g, rho);
  double v = 0.0, norm = 0.0;
  for (std::size_t j = 0; j < mr.size(); ++j) {
    v += pes.potential(g.r()[j]) * mr[j];
    norm += mr[j];
  }
  return v / norm + 0.5 * kinetic_temperature(g, rho, mass);
}

std::vector<double> canonical_reference(const PhaseSpaceGrid& g, const PesModel& pes, double mass,
                                        double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("canonical_reference: temperature must be positive");
  std::vector<double> v(g.size_r());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = pes.potential(g.r()[j]);
  double emin = *std::min_element(v.begin(), v.end());
  double kmin = std::numeric_limits<double>::infinity();
  for (double p : g.p()) kmin = std::min(kmin, p * p / (2.0 * mass));
  emin += kmin;
  std::vector<double> rho(g.size());
  double z = 0.0;
  for (std::size_t j = 0; j < g.size_r(); ++j) {
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double p = g.p()[l];
      const double w = std::exp(-(p * p / (2.0 * mass) + v[j] - emin) / temperature);
      rho[g.index(j, l)] = w;
      z += w;
    }
  }
  const double scale = 1.0 / (z * g.cell_area());
  for (double& x : rho) x *= scale;
  return rho;
}

double kl_divergence(std::span<const double> rho, std::span<const double> rho_eq, double cell_area) {
  if (rho.size() != rho_eq.size()) throw std::invalid_argument("kl_divergence: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= 0.0) continue;
    d += rho[i] * std::log(std::max(rho[i], kLogFloor) / std::max(rho_eq[i], kLogFloor));
  }
  return d * cell_area;
}

double total_variation(std::span<const double> a, std::span<const double> b, double cell_area) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d * cell_area;
}

RelaxationResult relax(KvnState initial, const PesModel& pes, const LangevinParams& params,
                       int n_steps, int record_every, const SnapshotFn& on_step) {
  if (n_steps < 0) throw ConfigError("n_steps must be >= 0");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  initial.require_basis(Basis::RP, "relax");
  const GridPtr grid = initial.grid_ptr();
  const auto& g = *grid;
  const auto rho_eq = canonical_reference(g, pes, params.mass, params.t_phys);
  LangevinStepper stepper(grid, pes, params);

  RelaxationResult out{{}, std::move(initial), 0, 0.0, 0, {}};
  auto record = [&](int step) {
    const auto rho = density(out.final_state);
    RelaxationRecord r;
    r.step = step;
    r.time = step * params.dt;
    r.mean_r = mean_r(g, rho);
    r.t_kin = kinetic_temperature(g, rho, params.mass);
    r.d_kl = kl_divergence(rho, rho_eq, g.cell_area());
    r.cum_success = std::exp(stepper.log_cumulative_success());
    out.trace.push_back(r);
  };

  record(0);
  if (on_step) on_step(0, out.final_state);
  for (int n = 1; n <= n_steps; ++n) {
    try {
      const StepReport rep = stepper.step(out.final_state);
      out.max_friction_correction = std::max(out.max_friction_correction, rep.friction_correction);
      if (rep.boundary_leak) ++out.boundary_leak_steps;
    } catch (const FilterCollapseError& e) {
      out.failure = e.what();
      break;
    }
    out.steps_done = n;
    if (n % record_every == 0 || n == n_steps) record(n);
    if (on_step) on_step(n, out.final_state);
  }
  return out;
}

}  // namespace kvn
