#pragma once

#include <optional>
#include <string_view>

#include "mrr/input_capture.hpp"
#include "mrr/steering.hpp"

namespace mrr {

enum class AgentMode { Wander, Helpful, Challenging };

std::string_view to_string(AgentMode m);
AgentMode agent_mode_from_string(std::string_view s);

// Commanded fish behavior for each agent mode.
constexpr BehaviorKind behavior_for(AgentMode m) {
  switch (m) {
    case AgentMode::Wander: return BehaviorKind::Wander;
    case AgentMode::Helpful: return BehaviorKind::Pursue;
    case AgentMode::Challenging: return BehaviorKind::Flee;
  }
  return BehaviorKind::Wander;
}

struct DifficultyConfig {
  double v_min = 0.03;    // m/s
  double v_max = 0.25;    // m/s
  double t_low = 3.0;     // s below v_min before Helpful
  double t_high = 3.0;    // s above v_max before Challenging
  double t_return = 2.0;  // s inside [v_min, v_max] before returning to Wander

  void validate() const;
  friend bool operator==(const DifficultyConfig&, const DifficultyConfig&) = default;
};

// Partial DifficultyConfig update; unset fields keep their current value.
struct DifficultyPatch {
  std::optional<double> v_min;
  std::optional<double> v_max;
  std::optional<double> t_low;
  std::optional<double> t_high;
  std::optional<double> t_return;

  // Returns the patched config; throws ConfigError if the result is invalid.
  DifficultyConfig apply(const DifficultyConfig& base) const;
  bool empty() const { return !v_min && !v_max && !t_low && !t_high && !t_return; }
  friend bool operator==(const DifficultyPatch&, const DifficultyPatch&) = default;
};

struct AgentState {
  AgentMode mode = AgentMode::Wander;
  double dwell_below = 0.0;
  double dwell_above = 0.0;
  double dwell_inside = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct TransitionEvent {
  double t = 0.0;
  AgentMode from = AgentMode::Wander;
  AgentMode to = AgentMode::Wander;
  double trigger_speed = 0.0;

  friend bool operator==(const TransitionEvent&, const TransitionEvent&) = default;
};

struct Observation {
  AgentState state;
  BehaviorKind behavior = BehaviorKind::Wander;
  std::optional<TransitionEvent> transition;
};

// Dwell comparisons tolerate this much accumulated rounding.
inline constexpr double kDwellEpsilon = 1e-9;

// One agent update. The band holding hand.speed accumulates dt, the other
// two accumulators reset; speeds equal to v_min or v_max are inside the band.
// Helpful and Challenging only exit to Wander. The transition timestamp is
// hand.t.
Observation observe(const AgentState& a, const HandState& hand, const DifficultyConfig& cfg,
                    double dt);

}  // namespace mrr
