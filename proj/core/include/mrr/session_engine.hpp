#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mrr/game_core.hpp"
#include "mrr/rng.hpp"
#include "mrr/session_store.hpp"

namespace mrr {

// Deterministic session driver shared by live sessions and replay. Given
// the same config, seed and per-tick inputs it produces the same events,
// trace and digest.
class SessionEngine {
 public:
  SessionEngine(GameConfig cfg, std::uint64_t seed);

  struct StepOutput {
    std::vector<GameEvent> events;
    std::optional<TraceSample> trace;
  };

  std::vector<GameEvent> start();
  // Applies patches and calibration, then runs one tick on `samples`.
  StepOutput advance(std::span<const RawSample> samples,
                     std::span<const DifficultyPatch> overrides = {},
                     const std::optional<CalibrationMap>& calibration = std::nullopt);
  GameEvent finish();

  const GameState& state() const { return state_; }
  const GameConfig& config() const { return cfg_; }
  std::uint64_t digest() const { return digest_; }
  bool started() const { return started_; }
  bool finished() const { return finished_; }

 private:
  GameConfig cfg_;
  Rng rng_;
  GameState state_;
  std::uint64_t digest_;
  std::int64_t last_trace_slot_ = 0;
  bool started_ = false;
  bool finished_ = false;
};

// Rolling FNV-1a over the numeric state of one tick.
std::uint64_t fold_state_digest(std::uint64_t digest, const GameState& s);
inline constexpr std::uint64_t kDigestSeed = 0xcbf29ce484222325ULL;

struct ReplayResult {
  SessionRecord regenerated;
  bool matches = true;
  std::optional<std::uint64_t> first_divergent_tick;
  std::string divergence;  // human-readable description of the first mismatch
};

// Re-executes the session from its header (config, seed) and recorded
// inputs, overrides and calibrations, then compares events, trace and footer
// with the recording.
ReplayResult replay_session(const SessionRecord& recorded);

}  // namespace mrr
