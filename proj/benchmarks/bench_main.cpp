#include <benchmark/benchmark.h>

#include <random>

#include "ssr/harness.hpp"
#include "ssr/pipeline.hpp"
#include "ssr/savitzky_golay.hpp"
#include "ssr/scan_rate.hpp"
#include "ssr/synth.hpp"

namespace {

using namespace ssr;

std::vector<double> noisy(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(1.0, 0.1);
  std::vector<double> y(n);
  for (auto& v : y) v = g(rng);
  return y;
}

void BM_SavitzkyGolay(benchmark::State& state) {
  const auto y = noisy(37999);
  const int degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sg_filter(y, degree, 500));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(y.size()));
}
BENCHMARK(BM_SavitzkyGolay)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_VisibilityIntegral(benchmark::State& state) {
  const auto cfg = default_config(Scale::kDesk);
  for (auto _ : state) benchmark::DoNotOptimize(visibility_integral(cfg.squeezed, cfg.scan));
}
BENCHMARK(BM_VisibilityIntegral)->Unit(benchmark::kMicrosecond);

void BM_EnhancementGrid(benchmark::State& state) {
  const auto cfg = default_config(Scale::kDesk);
  std::vector<double> gains(50), ratios(50);
  for (int i = 0; i < 50; ++i) {
    gains[i] = std::pow(10.0, 2.0 * i / 49.0);
    ratios[i] = std::pow(10.0, -0.5 + 3.5 * i / 49.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(enhancement_grid(0.69, gains, ratios, cfg.squeezed, cfg.scan));
  }
}
BENCHMARK(BM_EnhancementGrid)->Unit(benchmark::kMillisecond);

void BM_SynthesizeRun(benchmark::State& state) {
  auto cfg = default_config(Scale::kDesk);
  cfg.synth.n_spectra = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_run(cfg.squeezed, cfg.synth, 0));
}
BENCHMARK(BM_SynthesizeRun)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  auto cfg = default_config(Scale::kDesk);
  cfg.synth.n_spectra = static_cast<int>(state.range(0));
  const auto raw = synthesize_run(cfg.squeezed, cfg.synth, 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(raw, cfg.pipeline));
}
BENCHMARK(BM_Pipeline)->Arg(11)->Arg(101)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
