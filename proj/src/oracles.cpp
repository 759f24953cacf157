#include "kvn/oracles.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kvn/error.hpp"
#include "kvn/units.hpp"

namespace kvn {

namespace {

inline std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

void check_step(const PesModel& pes, double mass, double r0, double dt) {
  const double w = std::sqrt(std::abs(pes.curvature(r0)) / mass);
  if (dt * w >= kMaxVerletPhase)
    throw ConfigError(fmt::format("Verlet step too large: dt*omega = {:.3g} >= {}", dt * w, kMaxVerletPhase));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(splitmix(splitmix(seed + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL + 1))) {}

std::uint64_t CounterRng::next_u64() {
  state_ += kGolden;
  return splitmix(state_);
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform(), u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * units::kPi * u2;
  spare_ = rad * std::sin(th);
  has_spare_ = true;
  return rad * std::cos(th);
}

Trajectory verlet_trajectory(const PesModel& pes, double mass, double r0, double p0, double dt,
                             int n_steps, int record_every) {
  if (!(dt > 0.0) || n_steps < 0 || record_every < 1) throw ConfigError("verlet: bad step parameters");
  check_step(pes, mass, r0, dt);
  Trajectory t;
  t.r.reserve(n_steps / record_every + 1);
  t.p.reserve(n_steps / record_every + 1);
  double r = r0, p = p0, f = pes.force(r);
  t.r.push_back(r);
  t.p.push_back(p);
  for (int n = 1; n <= n_steps; ++n) {
    p += 0.5 * dt * f;
    r += dt * p / mass;
    f = pes.force(r);
    p += 0.5 * dt * f;
    if (n % record_every == 0) {
      t.r.push_back(r);
      t.p.push_back(p);
    }
  }
  return t;
}

TrajectoryEnsemble verlet_ensemble(const PesModel& pes, double mass,
                                   std::span<const PhasePoint> initial, double dt, int n_steps,
                                   int record_every, std::uint64_t seed) {
  TrajectoryEnsemble e;
  e.dt = dt;
  e.sample_dt = dt * record_every;
  e.seed = seed;
  e.trajectories.resize(initial.size());
  const auto n = static_cast<std::ptrdiff_t>(initial.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    e.trajectories[i] = verlet_trajectory(pes, mass, initial[i].r, initial[i].p, dt, n_steps, record_every);
  return e;
}

TrajectoryEnsemble langevin_ensemble(const PesModel& pes, double mass, double gamma,
                                     double temperature, double dt, int n_steps,
                                     std::span<const PhasePoint> initial, std::uint64_t seed,
                                     int record_every) {
  if (!(mass > 0.0) || gamma < 0.0 || !(temperature > 0.0) || !(dt > 0.0) || n_steps < 0 ||
      record_every < 1)
    throw ConfigError("langevin_ensemble: bad parameters");
  const double c1 = std::exp(-gamma * dt);
  const double c2 = std::sqrt((1.0 - c1 * c1) * mass * temperature);
  TrajectoryEnsemble e;
  e.dt = dt;
  e.sample_dt = dt * record_every;
  e.seed = seed;
  e.trajectories.resize(initial.size());
  const auto n = static_cast<std::ptrdiff_t>(initial.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    Trajectory& t = e.trajectories[i];
    double r = initial[i].r, p = initial[i].p, f = pes.force(r);
    t.r.push_back(r);
    t.p.push_back(p);
    for (int s = 1; s <= n_steps; ++s) {
      p += 0.5 * dt * f;
      r += 0.5 * dt * p / mass;
      if (gamma > 0.0) p = c1 * p + c2 * rng.normal();
      r += 0.5 * dt * p / mass;
      f = pes.force(r);
      p += 0.5 * dt * f;
      if (s % record_every == 0) {
        t.r.push_back(r);
        t.p.push_back(p);
      }
    }
  }
  return e;
}

SamplerResult canonical_sampler(const PesModel& pes, double mass, double temperature, std::size_t n,
                                std::uint64_t seed, Range r_range) {
  if (!(temperature > 0.0)) throw ConfigError("canonical_sampler: temperature must be positive");
  if (!(r_range.lo < r_range.hi)) throw ConfigError("canonical_sampler: empty R range");
  const Range dom = pes.domain();
  const double lo = std::max(r_range.lo, dom.lo), hi = std::min(r_range.hi, dom.hi);
  const double width = hi - lo;

  /* deterministic start at the lowest point of a coarse scan */
  double start = lo, vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 512; ++i) {
    const double r = lo + width * (i + 0.5) / 512.0;
    const double v = pes.potential(r);
    if (v < vmin) {
      vmin = v;
      start = r;
    }
  }

  const double sp = std::sqrt(mass * temperature);
  SamplerResult out;
  out.samples.resize(n);
  std::vector<long> accepted(kSamplerChains, 0), proposed(kSamplerChains, 0);

#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < kSamplerChains; ++c) {
    const std::size_t share = n / kSamplerChains + (static_cast<std::size_t>(c) < n % kSamplerChains ? 1 : 0);
    const std::size_t offset = static_cast<std::size_t>(c) * (n / kSamplerChains) +
                               std::min<std::size_t>(c, n % kSamplerChains);
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    double r = start, v = pes.potential(r);
    double step = 0.1 * width;

    auto propose = [&]() -> bool {
      const double rn = r + step * (2.0 * rng.uniform() - 1.0);
      if (rn < lo || rn >= hi) {
        rng.uniform();
        return false;
      }
      const double vn = pes.potential(rn);
      const double u = rng.uniform();
      if (vn <= v || u < std::exp(-(vn - v) / temperature)) {
        r = rn;
        v = vn;
        return true;
      }
      return false;
    };

    int acc = 0;
    for (int it = 1; it <= kSamplerBurnIn; ++it) {
      acc += propose() ? 1 : 0;
      if (it % 50 == 0) {
        const double rate = acc / 50.0;
        step *= rate > 0.4 ? 1.2 : 1.0 / 1.2;
        step = std::min(step, width);
        acc = 0;
      }
    }
    for (std::size_t k = 0; k < share; ++k) {
      for (int t = 0; t < kSamplerThinning; ++t) {
        accepted[c] += propose() ? 1 : 0;
        ++proposed[c];
      }
      out.samples[offset + k] = {r, sp * rng.normal()};
    }
  }
  long a = 0, p = 0;
  for (int c = 0; c < kSamplerChains; ++c) {
    a += accepted[c];
    p += proposed[c];
  }
  out.acceptance_rate = p > 0 ? static_cast<double>(a) / static_cast<double>(p) : 0.0;
  out.warning = out.acceptance_rate < 0.1 || out.acceptance_rate > 0.9;
  return out;
}

TrajectoryEnsemble langevin_ensemble(const PesModel& pes, double mass, double gamma,
                                     double temperature, double dt, int n_steps, std::size_t n,
                                     std::uint64_t seed, Range r_range, int record_every) {
  const auto init = canonical_sampler(pes, mass, temperature, n, seed, r_range);
  return langevin_ensemble(pes, mass, gamma, temperature, dt, n_steps, init.samples,
                           splitmix(seed ^ 0x5eedULL), record_every);
}

std::vector<double> histogram_density(std::span<const PhasePoint> samples, const PhaseSpaceGrid& g) {
  if (samples.empty()) throw ConfigError("histogram_density: no samples");
  std::vector<double> h(g.size(), 0.0);
  std::size_t inside = 0;
  for (const auto& s : samples) {
    const double fj = std::floor((s.r - g.r_min()) / g.dr() + 0.5);
    const double fl = std::floor((s.p - g.p_min()) / g.dp() + 0.5);
    if (fj < 0 || fl < 0 || fj >= static_cast<double>(g.size_r()) || fl >= static_cast<double>(g.size_p()))
      continue;
    h[g.index(static_cast<std::size_t>(fj), static_cast<std::size_t>(fl))] += 1.0;
    ++inside;
  }
  if (inside == 0) return h;
  const double scale = 1.0 / (static_cast<double>(inside) * g.cell_area());
  for (double& x : h) x *= scale;
  return h;
}

MeanEstimate batch_mean(std::span<const double> x, int n_batches) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n < static_cast<std::size_t>(2 * n_batches)) n_batches = std::max<int>(1, static_cast<int>(n / 2));
  const std::size_t b = n / n_batches;
  double total = 0.0;
  for (double v : x) total += v;
  const double mean = total / static_cast<double>(n);
  double ss = 0.0;
  for (int k = 0; k < n_batches; ++k) {
    double s = 0.0;
    for (std::size_t i = k * b; i < (k + 1) * b; ++i) s += x[i];
    const double d = s / static_cast<double>(b) - mean;
    ss += d * d;
  }
  const double se = n_batches > 1 ? std::sqrt(ss / (n_batches - 1) / n_batches) : 0.0;
  return {mean, se};
}

std::vector<PhasePoint> final_points(const TrajectoryEnsemble& ens) {
  std::vector<PhasePoint> pts;
  pts.reserve(ens.trajectories.size());
  for (const auto& t : ens.trajectories) pts.push_back({t.r.back(), t.p.back()});
  return pts;
}

}  // namespace kvn
