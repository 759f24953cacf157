#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "kvn/error.hpp"
#include "kvn/propagator.hpp"
#include "kvn/tst.hpp"
#include "kvn/units.hpp"
#include "kvn/vdos.hpp"

using namespace kvn;

namespace {

constexpr double kPi = units::kPi;

/* (1/M) |sum_k e^{i k theta}|^2 */
double fejer_direct(int m, double theta) {
  const int M = 1 << m;
  std::complex<double> acc{0.0, 0.0};
  for (int k = 0; k < M; ++k) acc += std::polar(1.0, theta * k);
  return std::norm(acc) / M;
}

/* diagonal generator: amplitude i rotates at omega[i] */
UnitaryStep diagonal_step(std::vector<double> omega, double tau) {
  return [omega = std::move(omega), tau](KvnState& s) {
    auto a = s.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= std::polar(1.0, -omega[i] * tau);
  };
}

KvnState random_state(GridPtr g, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  KvnState s(g);
  for (auto& a : s.amplitudes()) a = {rng.normal(), rng.normal()};
  s.normalize();
  return s;
}

struct Harmonic {
  double mu = 1.0;
  double w0 = 1.0;
  GridPtr grid = build_grid(6, 6, {-6.0, 6.0}, {-6.0, 6.0});
  PesModel pes = harmonic_pes(1.0, 0.0);
};

}  // namespace

TEST(QpeConfig, BinGeometry) {
  QpeConfig c;
  c.ancillas = 5;
  c.tau = 0.25;
  c.omega_shift = 0.1;
  EXPECT_DOUBLE_EQ(c.window(), 2 * kPi / 0.25);
  EXPECT_DOUBLE_EQ(c.bin_width(), c.window() / 32);
  EXPECT_DOUBLE_EQ(c.bin_center(3), 0.1 + 3 * c.bin_width());
}

TEST(QpeConfig, RejectsBadValues) {
  QpeConfig c;
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.tau = 1.0;
  c.ancillas = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.ancillas = 4;
  c.trotter_substeps = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Fejer, MatchesDirectSum) {
  for (int m : {1, 3, 7})
    for (double th : {0.0, 1e-7, 0.01, 0.3, 1.0, kPi / 3, 2.5, -1.7}) EXPECT_NEAR(fejer_kernel(m, th), fejer_direct(m, th), 1e-9);
}

TEST(Fejer, FrozenValues) {
  EXPECT_DOUBLE_EQ(fejer_kernel(3, 0.0), 8.0);
  EXPECT_NEAR(fejer_kernel(3, kPi / 4), 0.0, 1e-14);
  EXPECT_NEAR(fejer_kernel(3, kPi / 8), 3.284267796136023, 1e-12);
  EXPECT_NEAR(fejer_kernel(2, kPi / 2 + 2 * kPi), 0.0, 1e-14);
}

TEST(Qpe, OnBinEigenstateIsDeterministic) {
  auto g = build_grid(3, 3, {0.0, 1.0}, {-1.0, 1.0});
  QpeConfig c;
  c.ancillas = 5;
  c.tau = 0.5;
  const double w = c.bin_center(11);
  auto s = random_state(g, 3);
  const auto p = qpe_distribution(s, diagonal_step(std::vector<double>(g->size(), w), c.tau), c);
  for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(p[j], j == 11 ? 1.0 : 0.0, 1e-10) << j;
}

TEST(Qpe, OffBinEigenstateReproducesFejerKernel) {
  auto g = build_grid(3, 3, {0.0, 1.0}, {-1.0, 1.0});
  QpeConfig c;
  c.ancillas = 6;
  c.tau = 0.3;
  c.omega_shift = 0.7;
  const double w = c.bin_center(20) + 0.37 * c.bin_width();
  auto s = random_state(g, 4);
  const auto p = qpe_distribution(s, diagonal_step(std::vector<double>(g->size(), w), c.tau), c);
  const double M = static_cast<double>(c.bins());
  for (std::size_t j = 0; j < p.size(); ++j)
    EXPECT_NEAR(p[j], fejer_kernel(c.ancillas, (w - c.bin_center(j)) * c.tau) / M, 1e-10) << j;
}

TEST(Qpe, MixtureIsWeightedSumOfKernels) {
  auto g = build_grid(3, 3, {0.0, 1.0}, {-1.0, 1.0});
  QpeConfig c;
  c.ancillas = 5;
  c.tau = 0.4;
  std::vector<double> w(g->size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.13 * static_cast<double>(i) - 1.1;
  auto s = random_state(g, 5);
  const auto p = qpe_distribution(s, diagonal_step(w, c.tau), c);
  const auto a = s.amplitudes();
  const double M = static_cast<double>(c.bins());
  for (std::size_t j = 0; j < p.size(); ++j) {
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      ref += std::norm(a[i]) * g->cell_area() * fejer_kernel(c.ancillas, (w[i] - c.bin_center(j)) * c.tau) / M;
    EXPECT_NEAR(p[j], ref, 1e-10);
  }
}

TEST(Qpe, ToeplitzRouteMatchesDirectRoute) {
  auto g = build_grid(4, 4, {1.0, 3.5}, {-12.0, 12.0});
  const auto pes = morse_pes(0.1745, 1.0277, 1.4011);
  const double mu = units::kH2ReducedMass;
  NveStepper step(g, pes, mu, 4.0);
  auto s = random_state(g, 6);
  QpeConfig c;
  c.ancillas = 5;
  c.tau = 4.0;
  c.omega_shift = 0.01;
  const auto fast = qpe_distribution(s, [&](KvnState& x) { step.apply(x); }, c);
  const auto slow = qpe_distribution_direct(s, [&](KvnState& x) { step.apply(x); }, c);
  ASSERT_EQ(fast.size(), slow.size());
  for (std::size_t j = 0; j < fast.size(); ++j) EXPECT_NEAR(fast[j], slow[j], 1e-10);
  EXPECT_NEAR(std::accumulate(fast.begin(), fast.end(), 0.0), 1.0, 1e-10);
}

TEST(Qpe, ProbabilitiesSumToOneAndStayNonNegative) {
  Harmonic h;
  QpeConfig c;
  c.ancillas = 6;
  c.tau = default_qpe_tau(h.w0);
  c.trotter_substeps = default_trotter_substeps(h.w0, c.tau);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = qpe_spectrum(random_state(h.grid, seed), h.pes, h.mu, c);
    EXPECT_NEAR(std::accumulate(r.probability.begin(), r.probability.end(), 0.0), 1.0, 1e-10);
    for (double p : r.probability) EXPECT_GT(p, -1e-12);
  }
}

TEST(Qpe, RejectsMomentumBasisInput) {
  Harmonic h;
  QpeConfig c;
  c.ancillas = 3;
  c.tau = 0.5;
  auto s = fourier_p(encode_gaussian(h.grid, 0.0, 0.0, 1.0, 1.0));
  EXPECT_THROW(qpe_spectrum(s, h.pes, h.mu, c), std::exception);
}

TEST(ReferenceFrequency, HarmonicCurvature) {
  const double mu = 1836.0, w0 = 0.02;
  auto g = build_grid(7, 3, {0.5, 2.5}, {-1.0, 1.0});
  EXPECT_NEAR(reference_frequency(harmonic_pes(mu * w0 * w0, 1.4), *g, mu) / w0, 1.0, 1e-6);
}

TEST(ReferenceFrequency, MorseCurvature) {
  const double mu = units::kH2ReducedMass, de = 0.1745, a = 1.0277;
  auto g = build_grid(8, 3, {0.8, 4.0}, {-1.0, 1.0});
  const auto pes = morse_pes(de, a, 1.4011);
  const double exact = std::sqrt(2 * de * a * a / mu);
  const double w5 = reference_frequency(pes, *g, mu, 5);
  EXPECT_NEAR(w5 / exact, 1.0, 5e-3);
  EXPECT_LT(std::abs(reference_frequency(pes, *g, mu, 3) / w5 - 1.0), 2e-3);
}

TEST(ReferenceFrequency, MinimumOnBoundaryIsRejected) {
  auto g = build_grid(6, 3, {1.5, 4.0}, {-1.0, 1.0});
  EXPECT_THROW(reference_frequency(morse_pes(0.1745, 1.0277, 1.4011), *g, 918.0), DomainError);
}

TEST(DefaultTau, ReferenceFrequencyOnQuarterBin) {
  for (double w : {0.01, 0.0226, 1.0}) {
    QpeConfig c;
    c.ancillas = 7;
    c.tau = default_qpe_tau(w);
    EXPECT_NEAR(c.bin_center(c.bins() / 4) / w, 1.0, 1e-12);
    EXPECT_LE(w * c.tau / default_trotter_substeps(w, c.tau), 0.2 + 1e-12);
  }
}

TEST(BranchStates, WeightsSymmetricOnArbitraryStates) {
  Harmonic h;
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto b = prepare_branch_states(random_state(h.grid, seed), 0.8, h.mu);
    EXPECT_NEAR(b.weight_plus, b.weight_minus, 1e-10 * b.weight_plus);
    EXPECT_NEAR(b.plus.norm_squared(), 1.0, 1e-12);
    EXPECT_NEAR(b.minus.norm_squared(), 1.0, 1e-12);
  }
}

TEST(BranchStates, RealInputGivesMirrorDensities) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  const auto b = prepare_branch_states(eq, 1.0, h.mu);
  const auto dp = density(b.plus), dm = density(b.minus);
  for (std::size_t i = 0; i < dp.size(); ++i) EXPECT_NEAR(dp[i], dm[i], 1e-14);
}

TEST(BranchStates, GaussianWeightMatchesQuadrature) {
  Harmonic h;
  const double w = 1.3;
  auto s = encode_gaussian(h.grid, 0.4, -0.3, 0.9, 1.1);
  const auto b = prepare_branch_states(s, w, h.mu);
  const auto rho = density(s);
  const auto& g = *h.grid;
  double q2 = 0.0, pi2 = 0.0;
  for (std::size_t j = 0; j < g.size_r(); ++j)
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double q = g.r()[j] - b.mean_r, pi = g.p()[l] / (h.mu * w);
      q2 += q * q * rho[g.index(j, l)] * g.cell_area();
      pi2 += pi * pi * rho[g.index(j, l)] * g.cell_area();
    }
  EXPECT_NEAR(b.weight_plus, q2 + pi2, 1e-8);
}

TEST(BranchStates, DegenerateStateIsRejected) {
  auto g = build_grid(3, 3, {0.0, 1.0}, {-1.0, 1.0});
  KvnState s(g);
  s(2, 4) = 1.0;
  s.normalize();
  /* point mass at P = 0 */
  EXPECT_THROW(prepare_branch_states(s, 1.0, 1.0), NumericalError);
}

TEST(QpeSpectrum, HarmonicPeakAtOscillatorFrequency) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  QpeConfig c;
  c.ancillas = 6;
  c.tau = default_qpe_tau(h.w0);
  c.trotter_substeps = default_trotter_substeps(h.w0, c.tau);
  const std::size_t target = c.bins() / 4;
  for (double scale : {1.0, 0.8, 1.2}) {
    const auto b = prepare_branch_states(eq, scale * h.w0, h.mu);
    c.branch = Branch::Plus;
    const auto plus = qpe_spectrum(b.plus, h.pes, h.mu, c);
    c.branch = Branch::Minus;
    const auto minus = qpe_spectrum(b.minus, h.pes, h.mu, c);
    EXPECT_EQ(plus.peak_bin(), target) << scale;
    EXPECT_EQ(minus.peak_bin(), c.bins() - target) << scale;
    EXPECT_NEAR(display_frequency(c, minus.peak_bin(), Branch::Minus),
                display_frequency(c, plus.peak_bin(), Branch::Plus), 1e-12);
  }
}

TEST(QpeSpectrum, RealInputBranchesMirror) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  QpeConfig c;
  c.ancillas = 5;
  c.tau = default_qpe_tau(h.w0);
  c.trotter_substeps = default_trotter_substeps(h.w0, c.tau);
  const auto b = prepare_branch_states(eq, h.w0, h.mu);
  const auto plus = qpe_spectrum(b.plus, h.pes, h.mu, c);
  const auto minus = qpe_spectrum(b.minus, h.pes, h.mu, c);
  const std::size_t M = c.bins();
  for (std::size_t j = 0; j < M; ++j) EXPECT_NEAR(plus.probability[j], minus.probability[(M - j) % M], 1e-3) << j;
}

TEST(Autocorrelation, ZeroLagIsPositionVariance) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  const auto c = kvn_autocorrelation(eq, h.pes, h.mu, 0.05, 3);
  const auto b = prepare_branch_states(eq, h.w0, h.mu);
  const auto rho = density(eq);
  double q2 = 0.0;
  const auto& g = *h.grid;
  for (std::size_t j = 0; j < g.size_r(); ++j)
    for (std::size_t l = 0; l < g.size_p(); ++l) {
      const double q = g.r()[j] - b.mean_r;
      q2 += q * q * rho[g.index(j, l)] * g.cell_area();
    }
  EXPECT_NEAR(c[0].real(), q2, 1e-12);
  EXPECT_NEAR(c[0].imag(), 0.0, 1e-14);
  EXPECT_GT(c[0].real(), 0.0);
}

TEST(Autocorrelation, HarmonicRecurrenceAtPeriod) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  const double dt = 0.05;
  const int n = 200;
  const auto c = kvn_autocorrelation(eq, h.pes, h.mu, dt, n);
  /* strongest recurrence past half a period */
  int best = n / 2;
  for (int i = n / 2; i < n; ++i)
    if (c[i].real() > c[best].real()) best = i;
  EXPECT_NEAR(best * dt, 2 * kPi / h.w0, dt);
}

TEST(Autocorrelation, SpectrumAgreesWithQpeBin) {
  Harmonic h;
  auto eq = analytic_canonical_state(h.grid, h.pes, h.mu, 0.5);
  QpeConfig c;
  c.ancillas = 6;
  c.tau = default_qpe_tau(h.w0);
  const int L = 16;
  const int n = L * static_cast<int>(c.bins());
  const auto cc = kvn_autocorrelation(eq, h.pes, h.mu, c.tau / L, n);
  std::vector<double> re(cc.size());
  for (std::size_t i = 0; i < cc.size(); ++i) re[i] = cc[i].real();
  const auto s = binned_reference_spectrum(re, L, WindowKind::Hann, c);
  const auto peak = std::max_element(s.begin(), s.begin() + c.bins() / 2) - s.begin();
  EXPECT_EQ(static_cast<std::size_t>(peak), c.bins() / 4);
}

TEST(AimdReference, HarmonicTrajectoryInOscillatorBin) {
  const double mu = 1.0, w0 = 1.0;
  QpeConfig c;
  c.ancillas = 5;
  c.tau = default_qpe_tau(w0) * 1.07;
  const int L = 32;
  TrajectoryEnsemble ens;
  ens.sample_dt = c.tau / L;
  ens.dt = ens.sample_dt;
  ens.trajectories.push_back(
      verlet_trajectory(harmonic_pes(mu * w0 * w0, 2.0), mu, 2.5, 0.0, ens.sample_dt, L * static_cast<int>(c.bins())));
  const auto r = aimd_reference_spectrum(ens, WindowKind::Hann, c);
  EXPECT_NEAR(std::accumulate(r.probability.begin(), r.probability.end(), 0.0), 1.0, 1e-12);
  const std::size_t expect = static_cast<std::size_t>(std::lround(w0 / c.bin_width()));
  EXPECT_EQ(r.peak_bin(c.bins() / 2), expect);
}

TEST(AimdReference, LineAboveWindowWrapsIntoSameBin) {
  QpeConfig c;
  c.ancillas = 5;
  c.tau = 0.5;
  const int L = 4;
  const double w0 = c.bin_center(5) + 0.2 * c.bin_width();
  const std::size_t n = L * c.bins();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * c.tau / L;
    a[i] = std::cos(w0 * t);
    b[i] = std::cos((w0 + c.window()) * t);
  }
  const auto sa = binned_reference_spectrum(a, L, WindowKind::Hann, c);
  const auto sb = binned_reference_spectrum(b, L, WindowKind::Hann, c);
  const auto pa = std::max_element(sa.begin(), sa.begin() + c.bins() / 2) - sa.begin();
  const auto pb = std::max_element(sb.begin(), sb.begin() + c.bins() / 2) - sb.begin();
  EXPECT_EQ(pa, 5);
  EXPECT_EQ(pb, 5);
}

TEST(AimdReference, RectWindowAlsoNormalized) {
  QpeConfig c;
  c.ancillas = 4;
  c.tau = 1.0;
  std::vector<double> corr(64);
  for (std::size_t i = 0; i < corr.size(); ++i) corr[i] = std::cos(0.9 * static_cast<double>(i) / 4);
  const auto s = binned_reference_spectrum(corr, 4, WindowKind::Rect, c);
  EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
}

TEST(AimdReference, Errors) {
  QpeConfig c;
  c.ancillas = 4;
  c.tau = 1.0;
  TrajectoryEnsemble empty;
  empty.sample_dt = 0.25;
  EXPECT_THROW(aimd_reference_spectrum(empty, WindowKind::Hann, c), ConfigError);
  TrajectoryEnsemble odd;
  odd.sample_dt = 0.3;
  odd.trajectories.push_back({{1.0, 1.1}, {0.0, 0.0}});
  EXPECT_THROW(aimd_reference_spectrum(odd, WindowKind::Hann, c), ConfigError);
  EXPECT_THROW(binned_reference_spectrum(std::vector<double>{}, 4, WindowKind::Hann, c), ConfigError);
}

TEST(Display, MinusBranchFoldsOntoPositiveAxis) {
  QpeConfig c;
  c.ancillas = 7;
  c.tau = 3.0;
  for (std::size_t j = 1; j <= c.bins() / 2; ++j)
    EXPECT_NEAR(display_frequency(c, c.bins() - j, Branch::Minus), display_frequency(c, j, Branch::Plus), 1e-9);
  EXPECT_DOUBLE_EQ(display_frequency(c, 0, Branch::Minus), 0.0);
}
