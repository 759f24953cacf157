#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kvn/grid.hpp"
#include "kvn/kernels.hpp"
#include "kvn/oracles.hpp"
#include "kvn/propagator.hpp"
#include "kvn/units.hpp"

using namespace kvn;

namespace {

/* n qubits per axis, rows = cols = 2^n */
ComplexBuffer filled(std::size_t size, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  ComplexBuffer a(size);
  for (auto& x : a) x = {rng.normal(), rng.normal()};
  return a;
}

std::size_t side(const benchmark::State& st) { return std::size_t{1} << st.range(0); }

template <bool Par>
void BM_Multiply(benchmark::State& st) {
  const std::size_t n = side(st);
  auto a = filled(n * n, 1);
  const auto t = filled(n * n, 2);
  for (auto _ : st) {
    if constexpr (Par) kernels::parallel::multiply(a, t);
    else kernels::serial::multiply(a, t);
    kernels::serial::scale(a, 0.5);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n));
}

template <bool Par>
void BM_SumAbs2(benchmark::State& st) {
  const std::size_t n = side(st);
  const auto a = filled(n * n, 3);
  for (auto _ : st) {
    const double s = Par ? kernels::parallel::sum_abs2(a, n, n) : kernels::serial::sum_abs2(a, n, n);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n));
}

template <bool Par>
void BM_InnerProduct(benchmark::State& st) {
  const std::size_t n = side(st);
  const auto a = filled(n * n, 4), b = filled(n * n, 5);
  for (auto _ : st) {
    const auto s = Par ? kernels::parallel::inner_product(a, b, n, n) : kernels::serial::inner_product(a, b, n, n);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n));
}

template <bool Par>
void BM_ResampleRows(benchmark::State& st) {
  const std::size_t n = side(st);
  const auto in = filled(n * n, 6);
  ComplexBuffer out(n * n);
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::sin(0.37 * static_cast<double>(i));
  for (auto _ : st) {
    if constexpr (Par) kernels::parallel::resample_rows(in, out, n, n, m);
    else kernels::serial::resample_rows(in, out, n, n, m);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n * n));
}

void BM_NveStep(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  auto g = build_grid(q, q, {units::angstrom_to_bohr(0.3), units::angstrom_to_bohr(4.0)}, {-30.0, 30.0});
  const auto pes = morse_pes(0.1745, 1.0277, 1.4011);
  NveStepper step(g, pes, units::kH2ReducedMass, 0.5);
  auto s = encode_gaussian(g, 1.4, 0.0, 0.2, 5.0);
  for (auto _ : st) {
    step.apply(s);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g->size()));
}

}  // namespace

BENCHMARK(BM_Multiply<false>)->Name("multiply/serial")->DenseRange(7, 10, 1);
BENCHMARK(BM_Multiply<true>)->Name("multiply/parallel")->DenseRange(7, 10, 1);
BENCHMARK(BM_SumAbs2<false>)->Name("sum_abs2/serial")->DenseRange(7, 10, 1);
BENCHMARK(BM_SumAbs2<true>)->Name("sum_abs2/parallel")->DenseRange(7, 10, 1);
BENCHMARK(BM_InnerProduct<false>)->Name("inner_product/serial")->DenseRange(7, 10, 1);
BENCHMARK(BM_InnerProduct<true>)->Name("inner_product/parallel")->DenseRange(7, 10, 1);
BENCHMARK(BM_ResampleRows<false>)->Name("resample_rows/serial")->DenseRange(6, 8, 1);
BENCHMARK(BM_ResampleRows<true>)->Name("resample_rows/parallel")->DenseRange(6, 8, 1);
BENCHMARK(BM_NveStep)->Name("nve_step")->DenseRange(7, 10, 1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
