#include "mrr/difficulty_agent.hpp"

#include <string>

#include "mrr/errors.hpp"

namespace mrr {

std::string_view to_string(AgentMode m) {
  switch (m) {
    case AgentMode::Wander: return "wander";
    case AgentMode::Helpful: return "helpful";
    case AgentMode::Challenging: return "challenging";
  }
  return "wander";
}

AgentMode agent_mode_from_string(std::string_view s) {
  if (s == "wander") return AgentMode::Wander;
  if (s == "helpful") return AgentMode::Helpful;
  if (s == "challenging") return AgentMode::Challenging;
  throw Error("unknown agent mode '" + std::string(s) + "'");
}

void DifficultyConfig::validate() const {
  if (!(v_min > 0.0)) throw ConfigError("difficulty.v_min must be > 0");
  if (!(v_max > v_min)) throw ConfigError("difficulty.v_max must be > difficulty.v_min");
  if (!(t_low > 0.0)) throw ConfigError("difficulty.t_low must be > 0");
  if (!(t_high > 0.0)) throw ConfigError("difficulty.t_high must be > 0");
  if (!(t_return > 0.0)) throw ConfigError("difficulty.t_return must be > 0");
}

DifficultyConfig DifficultyPatch::apply(const DifficultyConfig& base) const {
  DifficultyConfig c = base;
  if (v_min) c.v_min = *v_min;
  if (v_max) c.v_max = *v_max;
  if (t_low) c.t_low = *t_low;
  if (t_high) c.t_high = *t_high;
  if (t_return) c.t_return = *t_return;
  c.validate();
  return c;
}

Observation observe(const AgentState& a, const HandState& hand, const DifficultyConfig& cfg,
                    double dt) {
  AgentState next = a;
  const double speed = hand.speed;
  if (speed < cfg.v_min) {
    next.dwell_below += dt;
    next.dwell_above = 0.0;
    next.dwell_inside = 0.0;
  } else if (speed > cfg.v_max) {
    next.dwell_above += dt;
    next.dwell_below = 0.0;
    next.dwell_inside = 0.0;
  } else {
    next.dwell_inside += dt;
    next.dwell_below = 0.0;
    next.dwell_above = 0.0;
  }

  AgentMode target = next.mode;
  switch (next.mode) {
    case AgentMode::Wander:
      if (next.dwell_below >= cfg.t_low - kDwellEpsilon) {
        target = AgentMode::Helpful;
      } else if (next.dwell_above >= cfg.t_high - kDwellEpsilon) {
        target = AgentMode::Challenging;
      }
      break;
    case AgentMode::Helpful:
    case AgentMode::Challenging:
      if (next.dwell_inside >= cfg.t_return - kDwellEpsilon) target = AgentMode::Wander;
      break;
  }

  Observation out;
  if (target != next.mode) {
    out.transition = TransitionEvent{hand.t, next.mode, target, speed};
    next = AgentState{target, 0.0, 0.0, 0.0};
  }
  out.state = next;
  out.behavior = behavior_for(next.mode);
  return out;
}

}  // namespace mrr
