#include "mrr/session_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "mrr/errors.hpp"
#include "mrr/json_codec.hpp"

namespace mrr {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

struct Fnv {
  std::uint64_t h;
  void bytes(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= kFnvPrime;
    }
  }
  void num(double v) { bytes(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vec3& v) {
    num(v.x);
    num(v.y);
    num(v.z);
  }
};

std::int64_t slot_of(std::uint64_t tick, double rate, double tick_rate) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(tick) * rate / tick_rate + 1e-9));
}

std::string describe(const GameEvent& e) { return to_json(e).dump(); }

}  // namespace

std::uint64_t fold_state_digest(std::uint64_t digest, const GameState& s) {
  Fnv f{digest};
  f.bytes(s.tick);
  f.vec(s.fish.pos);
  f.vec(s.fish.vel);
  f.bytes(static_cast<std::uint64_t>(s.fish.behavior));
  f.vec(s.hand.pos);
  f.vec(s.hand.vel);
  f.num(s.hand.speed);
  f.bytes(static_cast<std::uint64_t>(s.agent.mode));
  f.num(s.agent.dwell_below);
  f.num(s.agent.dwell_above);
  f.num(s.agent.dwell_inside);
  f.num(s.progress.fraction);
  f.bytes((s.progress.in_contact ? 1U : 0U) | (s.progress.refractory ? 2U : 0U) |
          (s.tracking_lost ? 4U : 0U));
  f.bytes(s.endorsed_touch_count);
  for (const auto& t : s.tasks) f.bytes(static_cast<std::uint64_t>(t.status));
  return f.h;
}

SessionEngine::SessionEngine(GameConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed), digest_(kDigestSeed) {
  cfg_.validate();
  state_ = make_initial_state(cfg_);
}

std::vector<GameEvent> SessionEngine::start() {
  if (started_) return {};
  started_ = true;
  return start_session(state_, cfg_);
}

SessionEngine::StepOutput SessionEngine::advance(std::span<const RawSample> samples,
                                                 std::span<const DifficultyPatch> overrides,
                                                 const std::optional<CalibrationMap>& calibration) {
  if (!started_ || finished_) throw SessionClosed("session is not running");
  for (const auto& p : overrides) cfg_.difficulty = p.apply(cfg_.difficulty);
  if (calibration) cfg_.calibration = *calibration;

  TickResult r = tick(state_, samples, cfg_, rng_);
  state_ = std::move(r.state);
  digest_ = fold_state_digest(digest_, state_);

  StepOutput out;
  out.events = std::move(r.events);
  const auto slot = slot_of(state_.tick, cfg_.trace_rate, cfg_.tick_rate);
  if (slot > last_trace_slot_) {
    last_trace_slot_ = slot;
    out.trace = TraceSample{state_.tick,  state_.t,          state_.hand.pos, state_.hand.vel,
                            state_.hand.speed, state_.tracking_lost, digest_};
  }
  return out;
}

GameEvent SessionEngine::finish() {
  finished_ = true;
  return end_session(state_);
}

ReplayResult replay_session(const SessionRecord& recorded) {
  ReplayResult out;
  SessionRecord& regen = out.regenerated;
  regen.header = recorded.header;

  std::uint64_t ticks = 0;
  if (recorded.footer) {
    ticks = recorded.footer->ticks;
  } else {
    for (const auto& e : recorded.events) ticks = std::max(ticks, e.tick);
    for (const auto& s : recorded.trace) ticks = std::max(ticks, s.tick);
    for (const auto& i : recorded.inputs) ticks = std::max(ticks, i.tick);
  }

  std::map<std::uint64_t, std::vector<RawSample>> inputs;
  for (const auto& i : recorded.inputs) inputs[i.tick].push_back(i.sample);
  std::map<std::uint64_t, std::vector<DifficultyPatch>> overrides;
  for (const auto& o : recorded.overrides) overrides[o.tick].push_back(o.patch);
  std::map<std::uint64_t, CalibrationMap> calibrations;
  for (const auto& c : recorded.calibrations) calibrations[c.tick] = c.map;

  SessionEngine engine(recorded.header.config, recorded.header.seed);
  for (auto& e : engine.start()) regen.events.push_back(std::move(e));
  static const std::vector<RawSample> kNoSamples;
  static const std::vector<DifficultyPatch> kNoPatches;
  for (std::uint64_t k = 1; k <= ticks; ++k) {
    auto in = inputs.find(k);
    auto ov = overrides.find(k);
    auto cal = calibrations.find(k);
    std::optional<CalibrationMap> map;
    if (cal != calibrations.end()) map = cal->second;
    const auto& samples = in == inputs.end() ? kNoSamples : in->second;
    const auto& patches = ov == overrides.end() ? kNoPatches : ov->second;
    SessionEngine::StepOutput step = engine.advance(samples, patches, map);
    for (auto& e : step.events) regen.events.push_back(std::move(e));
    if (step.trace) regen.trace.push_back(*step.trace);
  }
  regen.inputs = recorded.inputs;
  regen.overrides = recorded.overrides;
  regen.calibrations = recorded.calibrations;
  const bool ended = std::any_of(recorded.events.begin(), recorded.events.end(),
                                 [](const GameEvent& e) { return e.is<events::SessionEnded>(); });
  if (ended || recorded.footer) regen.events.push_back(engine.finish());
  if (recorded.footer) regen.footer = SessionFooter{engine.state().t, ticks, engine.digest()};

  // First divergence across events, trace and footer.
  auto note = [&](std::uint64_t tick, std::string what) {
    if (!out.first_divergent_tick || tick < *out.first_divergent_tick) {
      out.first_divergent_tick = tick;
      out.divergence = std::move(what);
    }
    out.matches = false;
  };
  const std::size_t ne = std::min(regen.events.size(), recorded.events.size());
  for (std::size_t i = 0; i < ne; ++i) {
    if (!(regen.events[i] == recorded.events[i])) {
      note(std::min(regen.events[i].tick, recorded.events[i].tick),
           "event " + std::to_string(i) + ": recorded " + describe(recorded.events[i]) +
               ", replayed " + describe(regen.events[i]));
      break;
    }
  }
  if (regen.events.size() != recorded.events.size()) {
    const auto& longer = regen.events.size() > ne ? regen.events : recorded.events;
    note(longer[ne].tick, "event count differs: recorded " + std::to_string(recorded.events.size()) +
                              ", replayed " + std::to_string(regen.events.size()));
  }
  const std::size_t nt = std::min(regen.trace.size(), recorded.trace.size());
  for (std::size_t i = 0; i < nt; ++i) {
    if (!(regen.trace[i] == recorded.trace[i])) {
      note(std::min(regen.trace[i].tick, recorded.trace[i].tick),
           "hand trace differs at tick " + std::to_string(recorded.trace[i].tick));
      break;
    }
  }
  if (regen.trace.size() != recorded.trace.size()) {
    const auto& longer = regen.trace.size() > nt ? regen.trace : recorded.trace;
    note(longer[nt].tick, "hand trace length differs");
  }
  if (recorded.footer && regen.footer && !(*recorded.footer == *regen.footer)) {
    note(ticks, "final state digest differs");
  }
  return out;
}

}  // namespace mrr
