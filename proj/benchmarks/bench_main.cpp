#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "edcps/coordinator.hpp"
#include "edcps/dc_link.hpp"
#include "edcps/sim.hpp"

using namespace edcps;

namespace {

MidcScenario four_infeed() {
  const double powers[] = {660.0, 630.0, 650.0, 540.0};
  const double k_gov[] = {14.0, 11.5, 13.5, 12.0};
  MidcScenario sc;
  for (int i = 0; i < 4; ++i) {
    LineConfig l;
    l.name = "hvdc" + std::to_string(i + 1);
    l.converter.p_rated = 800.0;
    l.converter.i_rated = 800.0 / 600.0;
    l.converter = calibrate_transformer_ratios(l.converter, 600.0, powers[i] / 600.0, deg_to_rad(15.0));
    l.droop.p_nominal = powers[i] / 1000.0;
    l.droop.p_ceiling = 0.88;
    l.sending.s_base = 2000.0;
    l.sending.k_gov = k_gov[i];
    sc.lines.push_back(l);
  }
  sc.receiving.s_base = 6000.0;
  sc.receiving.inertia_h = 6.0;
  sc.receiving.k_gov = 4.0;
  sc.coordinator.mode = CoordinatorMode::kOptimize;
  sc.events.push_back({8.0, BlockFault{3}});
  return sc;
}

OptimizationInput three_line(double p_loss) {
  OptimizationInput in;
  in.p_loss = p_loss;
  in.k_g_send = {30.0, 25.0, 29.0};
  in.k_g_recv = 6.0;
  in.p_dc_current = {0.66, 0.63, 0.65};
  in.p_dc_rated = {0.8, 0.8, 0.8};
  in.k_max = {1.1, 1.1, 1.1};
  in.omega_bounds.assign(4, FrequencyBand{});
  return in;
}

void BM_SteadyState(benchmark::State& state) {
  const ConverterParams p = calibrate_transformer_ratios({}, 600.0, 1.1, deg_to_rad(15.0));
  double i = 0.6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_steady_state(i, p));
    i = i < 1.2 ? i + 1e-4 : 0.6;
  }
}
BENCHMARK(BM_SteadyState);

void BM_OptimizeDroop(benchmark::State& state) {
  // 0.54 is absorbed by droop alone; 0.9 hits headroom and sheds.
  const OptimizationInput in = three_line(state.range(0) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_droop(in));
}
BENCHMARK(BM_OptimizeDroop)->Arg(54)->Arg(90);

void BM_BruteForce(benchmark::State& state) {
  const OptimizationInput in = three_line(0.54);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_droop(in, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_BruteForce)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FourInfeedRun(benchmark::State& state) {
  MidcScenario sc = four_infeed();
  sc.sim.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK(BM_FourInfeedRun)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
