#pragma once

// Random value generators shared by unit and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "mrr/protocol.hpp"
#include "mrr/rng.hpp"

namespace mrr::testing {

inline double pick(Rng& rng, double lo, double hi) { return rng.uniform(lo, hi); }

inline std::uint64_t pick_index(Rng& rng, std::uint64_t n) { return rng.next_u64() % n; }

inline bool coin(Rng& rng) { return (rng.next_u64() & 1u) != 0; }

inline Vec3 random_vec3(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {pick(rng, lo, hi), pick(rng, lo, hi), pick(rng, lo, hi)};
}

inline std::string random_text(Rng& rng, std::size_t max_len = 24) {
  static constexpr std::string_view kAlphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-\"\\/\t\n{}[]:,";
  const std::size_t n = pick_index(rng, max_len + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(kAlphabet[pick_index(rng, kAlphabet.size())]);
  if (coin(rng)) s += "\xC3\xA9\xE2\x82\xAC";  // é€
  return s;
}

inline RawSample random_sample(Rng& rng) {
  return {pick(rng, 0.0, 1e4), pick(rng, -1.0, 2.0), pick(rng, -1.0, 2.0), coin(rng)};
}

inline DifficultyPatch random_patch(Rng& rng) {
  DifficultyPatch p;
  if (coin(rng)) p.v_min = pick(rng, 0.0, 0.1);
  if (coin(rng)) p.v_max = pick(rng, 0.1, 1.0);
  if (coin(rng)) p.t_low = pick(rng, 0.1, 10.0);
  if (coin(rng)) p.t_high = pick(rng, 0.1, 10.0);
  if (coin(rng)) p.t_return = pick(rng, 0.1, 10.0);
  return p;
}

inline Zone random_zone(Rng& rng) { return static_cast<Zone>(pick_index(rng, 4)); }
inline AgentMode random_mode(Rng& rng) { return static_cast<AgentMode>(pick_index(rng, 3)); }

inline GameEvent random_event(Rng& rng) {
  GameEvent e;
  e.t = pick(rng, 0.0, 1000.0);
  e.tick = rng.next_u64() >> 20;
  switch (pick_index(rng, 10)) {
    case 0: e.payload = events::SessionStarted{}; break;
    case 1: e.payload = events::SessionEnded{rng.next_u64() >> 20}; break;
    case 2: e.payload = events::TouchStarted{random_zone(rng)}; break;
    case 3: e.payload = events::TouchBroken{pick(rng, 0.0, 1.0)}; break;
    case 4: e.payload = events::TouchEndorsed{rng.next_u64() >> 40}; break;
    case 5: e.payload = events::TaskActivated{pick_index(rng, 4), random_zone(rng)}; break;
    case 6:
      e.payload = events::TaskCompleted{pick_index(rng, 4), random_zone(rng), pick(rng, 0, 60)};
      break;
    case 7:
      e.payload = events::AgentTransition{random_mode(rng), random_mode(rng), pick(rng, 0, 1)};
      break;
    case 8: e.payload = events::TrackingLost{}; break;
    default: e.payload = events::TrackingRecovered{}; break;
  }
  return e;
}

inline GameConfig random_config(Rng& rng) {
  GameConfig c;
  c.touch_radius = pick(rng, 0.01, 0.1);
  c.fill_duration = pick(rng, 0.5, 3.0);
  c.tick_rate = coin(rng) ? 60.0 : 30.0;
  c.broadcast_rate = coin(rng) ? 20.0 : 10.0;
  c.difficulty.v_min = pick(rng, 0.01, 0.05);
  c.difficulty.v_max = pick(rng, 0.2, 0.4);
  c.behavior.rng_seed = rng.next_u64();
  c.calibration = {pick(rng, 0.5, 1.0), pick(rng, -0.1, 0.1), pick(rng, -0.1, 0.1),
                   pick(rng, -0.1, 0.1), pick(rng, 0.3, 0.6), pick(rng, -0.1, 0.1)};
  if (coin(rng)) c.fish_start = Vec3{0.3, 0.2, 0.1};
  if (coin(rng)) c.tasks = {Zone::UpperLeft, Zone::BottomRight};
  return c;
}

inline protocol::ClientMessage random_client_message(Rng& rng) {
  using namespace protocol;
  switch (pick_index(rng, 5)) {
    case 0: {
      Hello h;
      h.client_kind = static_cast<ClientKind>(pick_index(rng, 3));
      h.protocol_version = coin(rng) ? std::string(kVersion) : random_text(rng, 8);
      return h;
    }
    case 1: return InputSample{random_sample(rng)};
    case 2: return Control{static_cast<ControlAction>(pick_index(rng, 4))};
    case 3: return TherapistOverride{random_patch(rng)};
    default: {
      Calibrate c;
      const std::size_t n = pick_index(rng, 6);
      for (std::size_t i = 0; i < n; ++i) {
        c.pairs.push_back({{pick(rng, 0, 1), pick(rng, 0, 1)}, {pick(rng, 0, 1), pick(rng, 0, 1)}});
      }
      return c;
    }
  }
}

inline protocol::ServerMessage random_server_message(Rng& rng) {
  using namespace protocol;
  switch (pick_index(rng, 4)) {
    case 0: return Welcome{random_text(rng), random_config(rng)};
    case 1: {
      StateUpdate u;
      u.tick = rng.next_u64() >> 16;
      u.t = pick(rng, 0.0, 1e5);
      u.fish_pos = random_vec3(rng);
      u.fish_vel = random_vec3(rng);
      u.hand_pos = random_vec3(rng);
      u.hand_speed = pick(rng, 0.0, 1.0);
      u.tracking_lost = coin(rng);
      u.agent_mode = random_mode(rng);
      u.progress = pick(rng, 0.0, 1.0);
      u.endorsed_touch_count = rng.next_u64() >> 40;
      const std::size_t n = pick_index(rng, 5);
      for (std::size_t i = 0; i < n; ++i) u.tasks.push_back(static_cast<TaskStatus>(pick_index(rng, 3)));
      return u;
    }
    case 2: return EventNotice{random_event(rng)};
    default: return ErrorNotice{static_cast<ErrorCode>(pick_index(rng, 6)), random_text(rng)};
  }
}

}  // namespace mrr::testing
