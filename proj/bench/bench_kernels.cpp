#include <benchmark/benchmark.h>

#include "jnlab/dyadic_cz.hpp"
#include "jnlab/generators.hpp"
#include "jnlab/jn_functionals.hpp"
#include "jnlab/metric_space.hpp"
#include "jnlab/reference.hpp"

// Serial reference against the OpenMP kernels. Run with JNLAB_THREADS unset (or OMP_NUM_THREADS) to vary the team.

namespace {

using namespace jnlab;

GridFunction grid(int depth, int dim) { return generate_function("random-martingale", FunctionParams{2.0, depth, dim, 1}); }

void BM_DyadicMaximal(benchmark::State& st) {
  const auto f = grid(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(dyadic_maximal(f, f.root_cube()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.cell_count()));
}

void BM_DyadicMaximalReference(benchmark::State& st) {
  const auto f = grid(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::dyadic_maximal(f, f.root_cube()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.cell_count()));
}

void BM_OscillationTable(benchmark::State& st) {
  const auto f = grid(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(oscillation_table(DyadicTree(f, f.root_cube())));
}

void BM_OscillationTableReference(benchmark::State& st) {
  const auto f = grid(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::oscillation_table(f, f.root_cube()));
}

void BM_HlMaximal(benchmark::State& st) {
  const auto s = generate_space("random-cloud", static_cast<std::size_t>(st.range(0)), 1);
  const auto f = generate_point_function("log-distance", s, 1);
  const Ball b0{0, 0.5 * s.diameter()};
  for (auto _ : st) benchmark::DoNotOptimize(hl_maximal_restricted(s, f, b0));
}

void BM_HlMaximalReference(benchmark::State& st) {
  const auto s = generate_space("random-cloud", static_cast<std::size_t>(st.range(0)), 1);
  const auto f = generate_point_function("log-distance", s, 1);
  const Ball b0{0, 0.5 * s.diameter()};
  for (auto _ : st) benchmark::DoNotOptimize(reference::hl_maximal_restricted(s, f, b0));
}

}  // namespace

BENCHMARK(BM_DyadicMaximal)->Arg(6)->Arg(9);
BENCHMARK(BM_DyadicMaximalReference)->Arg(6)->Arg(9);
BENCHMARK(BM_OscillationTable)->Arg(6)->Arg(9);
BENCHMARK(BM_OscillationTableReference)->Arg(6)->Arg(9);
BENCHMARK(BM_HlMaximal)->Arg(64)->Arg(200);
BENCHMARK(BM_HlMaximalReference)->Arg(64)->Arg(200);

BENCHMARK_MAIN();
