#include <benchmark/benchmark.h>

#include "qiline/grid.hpp"
#include "qiline/kernels.hpp"
#include "qiline/parse.hpp"

using namespace qiline;

namespace {

const MapExpr& sample_map() {
  static const MapExpr f = parse_map("A(2) * inv(B(1,1)) * logshift(3)");
  return f;
}

std::vector<Wide> sample_points(int count) {
  return SampleGrid{1, 1.5, count}.points();
}

void BM_DisplacementsSerial(benchmark::State& state) {
  auto xs = sample_points(static_cast<int>(state.range(0)));
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::displacements(sample_map(), xs, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DisplacementsOmp(benchmark::State& state) {
  auto xs = sample_points(static_cast<int>(state.range(0)));
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::displacements(sample_map(), xs, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RowsSerial(benchmark::State& state) {
  auto xs = sample_points(64);
  std::vector<MapExpr> fs;
  for (int k = 1; k <= state.range(0); ++k) fs.push_back(MapExpr::power_shift(k % 3 + 1, k) * sample_map());
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::displacement_rows(fs, xs, cfg));
}

void BM_RowsOmp(benchmark::State& state) {
  auto xs = sample_points(64);
  std::vector<MapExpr> fs;
  for (int k = 1; k <= state.range(0); ++k) fs.push_back(MapExpr::power_shift(k % 3 + 1, k) * sample_map());
  EvalConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::displacement_rows(fs, xs, cfg));
}

}  // namespace

BENCHMARK(BM_DisplacementsSerial)->Arg(40)->Arg(256)->Arg(1024);
BENCHMARK(BM_DisplacementsOmp)->Arg(40)->Arg(256)->Arg(1024);
BENCHMARK(BM_RowsSerial)->Arg(4)->Arg(16);
BENCHMARK(BM_RowsOmp)->Arg(4)->Arg(16);

BENCHMARK_MAIN();
