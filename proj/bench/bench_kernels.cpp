#include <benchmark/benchmark.h>

#include <string>

#include "cotrap/config.hpp"
#include "cotrap/equilibrium.hpp"
#include "cotrap/quantum.hpp"
#include "cotrap/stability.hpp"

using namespace cotrap;

namespace {

SimConfig reference() { return load_config(std::string(COTRAP_DATA_DIR) + "/paper_default.cfg"); }

ScanSpec scan_spec() {
  ScanSpec s;
  s.a_min = -0.2;
  s.a_max = 0.2;
  s.q_min = 0.0;
  s.q_max = 1.0;
  s.a_count = s.q_count = 40;
  s.p = 0.05;
  s.tone_ratio_n = 5;
  return s;
}

void BM_ScanSerial(benchmark::State& st) {
  const ScanSpec s = scan_spec();
  for (auto _ : st) benchmark::DoNotOptimize(stability_scan_serial(s));
}

void BM_ScanParallel(benchmark::State& st) {
  const ScanSpec s = scan_spec();
  for (auto _ : st) benchmark::DoNotOptimize(stability_scan(s, static_cast<int>(st.range(0))));
}

std::vector<double> kicks() {
  std::vector<double> k;
  for (int i = 1; i <= 200; ++i) k.push_back(i * 0.5e-9);
  return k;
}

const std::vector<Scenario> kScenarios{{"q800", 400.0, 800.0, 43e-6},
                                       {"q300", 400.0, 300.0, 33e-6},
                                       {"solved", 500.0, 800.0, std::nullopt}};

void BM_SweepSerial(benchmark::State& st) {
  const SimConfig c = reference();
  const auto k = kicks();
  for (auto _ : st) benchmark::DoNotOptimize(superposition_sweep_serial(c, k, kScenarios));
}

void BM_SweepParallel(benchmark::State& st) {
  const SimConfig c = reference();
  const auto k = kicks();
  for (auto _ : st)
    benchmark::DoNotOptimize(superposition_sweep(c, k, kScenarios, static_cast<int>(st.range(0))));
}

void BM_VoltageSweep(benchmark::State& st) {
  const SimConfig c = reference();
  std::vector<double> v;
  for (int i = 0; i < 64; ++i) v.push_back(200.0 + 5.0 * i);
  for (auto _ : st)
    benchmark::DoNotOptimize(separation_vs_voltage(c, v, 50e-6, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(1)->Arg(2)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(0)->Unit(benchmark::kMillisecond);
// Arg(1) is the warm-started serial reference.
BENCHMARK(BM_VoltageSweep)->Arg(1)->Arg(2)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
