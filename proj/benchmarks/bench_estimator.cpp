#include <benchmark/benchmark.h>

#include <vector>

#include "mrr/input_capture.hpp"

namespace {

// Hand estimate over a history of `range(0)` samples at 60 Hz.
void BM_EstimateState(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::vector<mrr::RawSample> h;
  for (int k = 0; k < n; ++k) {
    const double t = k / 60.0;
    h.push_back({t, 0.3 + 0.01 * t, 0.4 - 0.02 * t, true});
  }
  const mrr::CalibrationMap map{0.8, 0.0, 0.0, 0.0, 0.5, 0.0};
  const mrr::FilterConfig f;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrr::estimate_state(h, map, f));
  }
}
BENCHMARK(BM_EstimateState)->Arg(16)->Arg(60)->Arg(600);

void BM_SolveCalibration(benchmark::State& state) {
  const mrr::CalibrationMap truth{0.8, 0.05, 0.01, -0.02, 0.5, 0.03};
  std::vector<mrr::Correspondence> pairs;
  for (double u : {0.1, 0.5, 0.9}) {
    for (double v : {0.1, 0.9}) pairs.push_back({{u, v}, truth.apply({u, v})});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(mrr::solve_calibration(pairs));
  }
}
BENCHMARK(BM_SolveCalibration);

}  // namespace
