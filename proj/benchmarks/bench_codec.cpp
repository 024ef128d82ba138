#include <benchmark/benchmark.h>

#include "mrr/protocol.hpp"

namespace {

mrr::protocol::StateUpdate sample_update() {
  mrr::GameConfig cfg;
  mrr::GameState s = mrr::make_initial_state(cfg);
  mrr::start_session(s, cfg);
  return mrr::protocol::make_state_update(s);
}

void BM_EncodeStateUpdate(benchmark::State& state) {
  const mrr::protocol::ServerMessage m = sample_update();
  for (auto _ : state) benchmark::DoNotOptimize(mrr::protocol::encode(m));
}
BENCHMARK(BM_EncodeStateUpdate);

void BM_DecodeStateUpdate(benchmark::State& state) {
  const std::string text = mrr::protocol::encode(mrr::protocol::ServerMessage{sample_update()});
  for (auto _ : state) benchmark::DoNotOptimize(mrr::protocol::decode_server(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_DecodeStateUpdate);

void BM_DecodeInputSample(benchmark::State& state) {
  const std::string text =
      mrr::protocol::encode(mrr::protocol::ClientMessage{mrr::protocol::InputSample{{1.25, 0.4, 0.6, true}}});
  for (auto _ : state) benchmark::DoNotOptimize(mrr::protocol::decode_client(text));
}
BENCHMARK(BM_DecodeInputSample);

}  // namespace
