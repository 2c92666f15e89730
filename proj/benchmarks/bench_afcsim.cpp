#include <benchmark/benchmark.h>

#include <cmath>

#include "afcsim/analytics.hpp"
#include "afcsim/cavity.hpp"
#include "afcsim/montecarlo.hpp"
#include "afcsim/propagation.hpp"
#include "afcsim/timebin.hpp"

using namespace afcsim;

namespace {

FrequencyGrid grid_of(benchmark::State& state) {
  return {0.0, 64.0, static_cast<std::size_t>(state.range(0))};
}

CombSpec demo_comb() {
  CombSpec c;
  c.finesse = 5.8;
  c.shape = ToothShape::gaussian;
  c.peak_od = peak_od_for_effective_depth(ToothShape::gaussian, 5.8, 0.4);
  return c;
}

void BM_CombTransfer(benchmark::State& state) {
  const auto g = grid_of(state);
  const auto comb = demo_comb();
  for (auto _ : state) {
    auto tf = single_pass_transfer(build_comb_profile(comb, g, {18.0, 10.0}));
    benchmark::DoNotOptimize(tf.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CombTransfer)->RangeMultiplier(4)->Range(1 << 14, 1 << 20);

void BM_Propagate(benchmark::State& state) {
  const auto g = grid_of(state);
  const auto tf = cavity_reflection(single_pass_transfer(build_comb_profile(demo_comb(), g)),
                                    CavitySpec{});
  const auto pulse = make_gaussian_pulse(1.0, 4.0, 0.33, 0.0, g);
  for (auto _ : state) {
    auto out = propagate(pulse, tf);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Propagate)->RangeMultiplier(4)->Range(1 << 14, 1 << 20);

void BM_StorageTimeScan(benchmark::State& state) {
  StorageSetup s;
  s.comb = demo_comb();
  s.grid = {0.0, 64.0, 1 << 16};
  const std::vector<double> taus{2.0, 10.0, 30.0, 70.0};
  for (auto _ : state) benchmark::DoNotOptimize(scan_storage_time(s, taus, 89.0));
}
BENCHMARK(BM_StorageTimeScan)->Unit(benchmark::kMillisecond);

void BM_FringeScan(benchmark::State& state) {
  const FrequencyGrid g{0.0, 64.0, 1 << 16};
  CombSpec filter;
  filter.tooth_spacing = 1.0;
  filter.finesse = 8.0;
  filter.bandwidth = 16.0;
  filter.peak_od = 8.2;
  FringeSetup fs;
  fs.memory = TransferFunction::delay(g, 2.0);
  fs.filter_comb = filter;
  std::vector<double> shifts;
  for (int k = 0; k < 8; ++k) shifts.push_back(k / 8.0);
  auto q = TimeBinQubit::equator(0.0);
  q.pulse_fwhm = 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(fringe_scan(q, fs, shifts));
}
BENCHMARK(BM_FringeScan)->Unit(benchmark::kMillisecond);

void BM_Counting(benchmark::State& state) {
  CountingConfig cfg;
  const auto edges = uniform_edges(0.0, 10.0, 0.05);
  SignalTrace s{edges, std::vector<double>(edges.size() - 1, 0.001)};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_counting(s, cfg, HistogramTag::memory, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Counting)->Arg(60000)->Arg(600000)->Unit(benchmark::kMillisecond);

void BM_OptimizeDepth(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_depth(1.0, 0.01, 10.0, ToothShape::square));
}
BENCHMARK(BM_OptimizeDepth);

}  // namespace

BENCHMARK_MAIN();
