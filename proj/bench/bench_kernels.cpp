// Serial reference kernels against the blocked OpenMP kernels.
//   bench_kernels --benchmark_counters_tabular=true
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "polycwm/kernels.hpp"
#include "polycwm/simulate.hpp"

using namespace polycwm;
namespace k = polycwm::kernels;

namespace {

constexpr int kDegree = 3;

const Dataset& data_of(std::size_t n) {
  static std::vector<std::pair<std::size_t, Dataset>> cache;
  for (const auto& [size, d] : cache)
    if (size == n) return d;
  Generator gen{benchmark_parameters(), std::nullopt, 17};
  cache.emplace_back(n, sample(gen, n));
  return cache.back().second;
}

template <double (*EStep)(const Dataset&, const MixtureParams&, DensityModel, Responsibilities&)>
void e_step(benchmark::State& state) {
  const auto& d = data_of(static_cast<std::size_t>(state.range(0)));
  const auto psi = benchmark_parameters();
  Responsibilities resp;
  for (auto _ : state) benchmark::DoNotOptimize(EStep(d, psi, DensityModel::Cwm, resp));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

template <k::MStepOutcome (*MStep)(const Dataset&, const Responsibilities&, int, double)>
void m_step(benchmark::State& state) {
  const auto& d = data_of(static_cast<std::size_t>(state.range(0)));
  Responsibilities resp;
  k::serial::e_step(d, benchmark_parameters(), DensityModel::Cwm, resp);
  for (auto _ : state) benchmark::DoNotOptimize(MStep(d, resp, kDegree, 1e-10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(e_step<k::serial::e_step>)->Name("e_step/serial")->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(e_step<k::omp::e_step>)->Name("e_step/omp")->RangeMultiplier(10)->Range(1000, 1000000)->UseRealTime();
BENCHMARK(m_step<k::serial::m_step>)->Name("m_step/serial")->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(m_step<k::omp::m_step>)->Name("m_step/omp")->RangeMultiplier(10)->Range(1000, 1000000)->UseRealTime();

BENCHMARK_MAIN();
