// Serial reference vs OpenMP kernels, and the energy ledger that uses them.

#include <benchmark/benchmark.h>

#include <random>

#include "itee/kernels.hpp"
#include "itee/solver.hpp"
#include "itee/theorems.hpp"

using namespace itee;

namespace {

std::vector<double> random_vector(int n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

void BM_ReduceSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto v = random_vector(n);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reduce_serial(n, [&](int i) { return v[i] * v[i]; }));
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_ReduceParallel(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto v = random_vector(n);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reduce_parallel(n, [&](int i) { return v[i] * v[i]; }));
  st.SetItemsProcessed(st.iterations() * n);
}

void BM_AxpySerial(benchmark::State& st) {
  const auto x = random_vector(static_cast<int>(st.range(0)));
  auto y = x;
  for (auto _ : st) {
    kernels::axpy_serial(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_AxpyParallel(benchmark::State& st) {
  const auto x = random_vector(static_cast<int>(st.range(0)));
  auto y = x;
  for (auto _ : st) {
    kernels::axpy_parallel(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_EnergyLedger2D(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  GridSpec gs;
  gs.dim = 2;
  gs.n = {n, n};
  for (auto& p : gs.partitions) p = FacePartition{faces_of(2), {}};
  const Grid g(gs);
  EffectiveConstants ec;
  ec.dim = 2;
  for (int i = 0; i < 2; ++i) {
    ec.L(i, i) = 1.0;
    ec.kap_2(i, i) = 0.1;
    for (int j = 0; j < 2; ++j) ec.G(i, j, i, j) = 1.0;
  }
  ec.alpha = 1.0;
  IncrementalState s = zero_state(g);
  const auto r = random_vector(g.nodes() * 2);
  s.u.values = r;
  s.v.values = r;
  for (int k = 0; k < g.nodes(); ++k) s.phi.at(k) = s.theta.at(k) = r[k];
  for (auto _ : st) benchmark::DoNotOptimize(energy_functionals(g, ec, 1.0, s));
}

}  // namespace

BENCHMARK(BM_ReduceSerial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_ReduceParallel)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_AxpySerial)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_AxpyParallel)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_EnergyLedger2D)->Arg(101)->Arg(401);

BENCHMARK_MAIN();
