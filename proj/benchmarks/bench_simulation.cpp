#include <benchmark/benchmark.h>

#include "mrr/patient_sim.hpp"

namespace {

// One simulated minute per iteration, in-process, no session file.
void BM_SimulateMinute(benchmark::State& state, const char* profile) {
  const mrr::PatientModel p = mrr::find_patient_profile(profile, MRR_PROFILE_DIR);
  mrr::SimulationOptions o;
  o.duration = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(mrr::run_simulation(mrr::GameConfig{}, p, o));
  state.SetItemsProcessed(state.iterations() * 3600);
}
BENCHMARK_CAPTURE(BM_SimulateMinute, stuck, "stuck")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulateMinute, fast, "fast")->Unit(benchmark::kMillisecond);

}  // namespace
