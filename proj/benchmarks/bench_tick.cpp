#include <benchmark/benchmark.h>

#include "mrr/game_core.hpp"
#include "mrr/steering.hpp"

namespace {

void BM_Tick(benchmark::State& state) {
  const mrr::GameConfig cfg;
  mrr::Rng rng(1);
  mrr::GameState s = mrr::make_initial_state(cfg);
  mrr::start_session(s, cfg);
  std::uint64_t k = 0;
  for (auto _ : state) {
    ++k;
    const double t = static_cast<double>(k) * cfg.dt();
    const mrr::RawSample sample{t, 0.5 + 0.1 * std::sin(t), 0.5 + 0.1 * std::cos(t), true};
    auto r = mrr::tick(s, std::span(&sample, 1), cfg, rng);
    s = std::move(r.state);
    benchmark::DoNotOptimize(s.fish.pos);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Tick);

void BM_WanderStep(benchmark::State& state) {
  const mrr::BehaviorParams p;
  mrr::Rng rng(2);
  mrr::FishState f{p.wander_center, {}, mrr::BehaviorKind::Wander};
  for (auto _ : state) {
    f = mrr::wander_step(f, p, rng, 1.0 / 60.0);
    benchmark::DoNotOptimize(f.pos);
  }
}
BENCHMARK(BM_WanderStep);

}  // namespace
