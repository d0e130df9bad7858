#include <benchmark/benchmark.h>

#include <cmath>

#include "superlin/attack_analysis.hpp"
#include "superlin/bb84_sim.hpp"
#include "superlin/detector_models.hpp"

namespace {

using namespace superlin;

SimConfig bench_config(BasisMode mode, std::uint64_t trials) {
  SimConfig config;
  config.trials = trials;
  config.pulse = TriggerPulse{16.0, std::nullopt, PulseKind::coherent};
  config.basis_mode = mode;
  config.seed = 7;
  config.detector0 = ParametricSuperlinearDetector(0.005, 0.002);
  config.detector1 = ParametricSuperlinearDetector(0.005, 0.002);
  return config;
}

void BM_SimulateActiveSerial(benchmark::State& state) {
  const auto config = bench_config(BasisMode::active, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_active_serial(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateActiveParallel(benchmark::State& state) {
  const auto config = bench_config(BasisMode::active, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_active(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulatePassiveSerial(benchmark::State& state) {
  const auto config = bench_config(BasisMode::passive, state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_passive_serial(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulatePassiveParallel(benchmark::State& state) {
  const auto config = bench_config(BasisMode::passive, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_passive(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

ScanRequest bench_scan(std::int64_t points) {
  ScanRequest request;
  for (std::int64_t k = 0; k < points; ++k)
    request.mu_grid.push_back(0.25 * std::pow(2.0, 12.0 * k / (points - 1)));
  request.objective = ScanObjective::within_loss(20.0);
  return request;
}

void BM_ScanSerial(benchmark::State& state) {
  const Detector d = ParametricSuperlinearDetector(0.005, 0.002);
  const auto request = bench_scan(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_attack_serial(d, d, request));
}

void BM_ScanParallel(benchmark::State& state) {
  const Detector d = ParametricSuperlinearDetector(0.005, 0.002);
  const auto request = bench_scan(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_attack(d, d, request));
}

}  // namespace

BENCHMARK(BM_SimulateActiveSerial)->Arg(1 << 20);
BENCHMARK(BM_SimulateActiveParallel)->Arg(1 << 20);
BENCHMARK(BM_SimulatePassiveSerial)->Arg(1 << 20);
BENCHMARK(BM_SimulatePassiveParallel)->Arg(1 << 20);
BENCHMARK(BM_ScanSerial)->Arg(1024);
BENCHMARK(BM_ScanParallel)->Arg(1024);

BENCHMARK_MAIN();
