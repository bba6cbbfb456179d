// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "segsamp/catalog.hpp"
#include "segsamp/concordance.hpp"
#include "segsamp/construction.hpp"
#include "segsamp/integration.hpp"
#include "segsamp/sampling.hpp"

using namespace segsamp;

namespace {

const SegmentSet& big_set() {
  static const SegmentSet s = aj_segment_set(6, 2);
  return s;
}

void BM_OrthantSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(lower_orthant_probability_serial(big_set(), VModel::Common));
}
void BM_OrthantParallel(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(lower_orthant_probability(big_set(), VModel::Common, Exec::Parallel));
}

void BM_Draw(benchmark::State& st, Exec exec) {
  const SegmentSet s = ccv_segment_set(8, {1, 2});
  for (auto _ : st) benchmark::DoNotOptimize(draw(s, st.range(0), 1, 0, false, exec).samples.data());
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_Integrate(benchmark::State& st, Exec exec) {
  IntegrationConfig cfg;
  cfg.integrand = make_integrand("wang-sloan", 20, 0.1, 0.1);
  cfg.points = {100};
  cfg.replications = 200;
  cfg.schemes = {glh_scheme(make_construction(Kind::Ccv, 2))};
  cfg.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(mc_integrate(cfg).front().mse);
}

}  // namespace

BENCHMARK(BM_OrthantSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrthantParallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Draw, serial, Exec::Serial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Draw, parallel, Exec::Parallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Integrate, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Integrate, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
