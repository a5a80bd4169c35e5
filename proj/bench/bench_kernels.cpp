// Serial versus OpenMP timings of the per-chain kernels.
//
//   ./build/bench/ssmt_bench --benchmark_filter=Filter
//
// The argument of every benchmark selects the backend: 0 serial, 1 openmp.

#include <benchmark/benchmark.h>

#include "ssmt/adaptive.hpp"
#include "ssmt/em.hpp"
#include "ssmt/kalman.hpp"
#include "ssmt/segmentation.hpp"
#include "ssmt/simulate.hpp"
#include "ssmt/tapers.hpp"

namespace {

constexpr double kSampleRate = 250.0;
constexpr std::size_t kWindow = 1000;
constexpr std::size_t kTapers = 5;

// Ten minutes of a 10 Hz AR(2) process cut into 4 s windows.
struct Fixture {
  ssmt::SegmentedSeries segmented;
  ssmt::TaperBank tapers;
  ssmt::EigenCoefficients obs;
  ssmt::ModelParams params;

  Fixture() : tapers(ssmt::dpss(kWindow, ssmt::default_time_half_bandwidth(kTapers), kTapers)) {
    ssmt::Rng rng(7);
    const ssmt::ArProcess ar{ssmt::ar_coeffs_from_roots({{10.0, 0.95}}, kSampleRate), 1.0};
    const auto x = ssmt::gen_ar(ar, 600.0, kSampleRate, rng);
    segmented = ssmt::segment(x, kWindow, kWindow);
    obs = ssmt::eigen_coefficients(segmented, tapers, ssmt::Backend::serial);
    params = ssmt::initial_params(obs);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

ssmt::Backend backend_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ssmt::Backend::serial : ssmt::Backend::openmp;
}

void BM_EigenCoefficients(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssmt::eigen_coefficients(f.segmented, f.tapers, backend_of(state)));
  }
}

void BM_FilterAll(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(ssmt::filter_all(f.obs, f.params, backend_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.obs.coeffs.size()));
}

void BM_EmIteration(benchmark::State& state) {
  const auto& f = fixture();
  ssmt::EmConfig config;
  config.tol = 0.0;
  config.max_iter = 1;
  config.initial = f.params;
  config.backend = backend_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(ssmt::em_fit(f.obs, config));
}

void BM_AssmtSpectrogram(benchmark::State& state) {
  const auto& f = fixture();
  const ssmt::AdaptiveParams adaptive(f.params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssmt::assmt_spectrogram(f.obs, adaptive, 0.95, backend_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.obs.coeffs.size()));
}

}  // namespace

BENCHMARK(BM_EigenCoefficients)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FilterAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssmtSpectrogram)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
