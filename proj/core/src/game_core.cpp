#include "mrr/game_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mrr/errors.hpp"

namespace mrr {

namespace {

// Tolerance on fill completion against accumulated dt rounding.
constexpr double kFillEpsilon = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::BottomRight: return "bottom_right";
    case Zone::BottomLeft: return "bottom_left";
    case Zone::UpperRight: return "upper_right";
    case Zone::UpperLeft: return "upper_left";
  }
  return "bottom_right";
}

Zone zone_from_string(std::string_view s) {
  if (s == "bottom_right") return Zone::BottomRight;
  if (s == "bottom_left") return Zone::BottomLeft;
  if (s == "upper_right") return Zone::UpperRight;
  if (s == "upper_left") return Zone::UpperLeft;
  throw Error("unknown zone '" + std::string(s) + "'");
}

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Active: return "active";
    case TaskStatus::Completed: return "completed";
  }
  return "pending";
}

TaskStatus task_status_from_string(std::string_view s) {
  if (s == "pending") return TaskStatus::Pending;
  if (s == "active") return TaskStatus::Active;
  if (s == "completed") return TaskStatus::Completed;
  throw Error("unknown task status '" + std::string(s) + "'");
}

Zone zone_of(const Vec3& pos, const Aabb& tank) {
  const Vec3 c = tank.center();
  const bool right = pos.x >= c.x;
  const bool upper = pos.y >= c.y;
  if (upper) return right ? Zone::UpperRight : Zone::UpperLeft;
  return right ? Zone::BottomRight : Zone::BottomLeft;
}

void GameConfig::validate() const {
  if (tank.empty()) throw ConfigError("tank: min must not exceed max");
  if (!is_finite(tank_anchor)) throw ConfigError("tank_anchor must be finite");
  if (!(touch_radius > 0.0)) throw ConfigError("touch_radius must be > 0");
  if (!(fill_duration > 0.0)) throw ConfigError("fill_duration must be > 0");
  if (!(tick_rate > 0.0)) throw ConfigError("tick_rate must be > 0");
  if (!(broadcast_rate > 0.0 && broadcast_rate <= tick_rate)) {
    throw ConfigError("broadcast_rate must be in (0, tick_rate]");
  }
  if (!(trace_rate > 0.0 && trace_rate <= tick_rate)) {
    throw ConfigError("trace_rate must be in (0, tick_rate]");
  }
  behavior.validate();
  difficulty.validate();
  filter.validate();
  if (calibration.determinant() == 0.0 || !std::isfinite(calibration.determinant())) {
    throw ConfigError("calibration must be invertible");
  }
  const Aabb bounds = tank_bounds();
  const Vec3 r{behavior.wander_radius, behavior.wander_radius, behavior.wander_radius};
  if (!bounds.contains(behavior.wander_center - r) || !bounds.contains(behavior.wander_center + r)) {
    throw ConfigError("behavior.wander_center: wander sphere must lie inside the tank");
  }
  if (!bounds.contains(initial_fish_position())) {
    throw ConfigError("fish_start must lie inside the tank");
  }
}

std::string_view event_kind_name(const EventPayload& p) {
  return std::visit(
      Overloaded{
          [](const events::SessionStarted&) -> std::string_view { return "session_started"; },
          [](const events::SessionEnded&) -> std::string_view { return "session_ended"; },
          [](const events::TouchStarted&) -> std::string_view { return "touch_started"; },
          [](const events::TouchBroken&) -> std::string_view { return "touch_broken"; },
          [](const events::TouchEndorsed&) -> std::string_view { return "touch_endorsed"; },
          [](const events::TaskActivated&) -> std::string_view { return "task_activated"; },
          [](const events::TaskCompleted&) -> std::string_view { return "task_completed"; },
          [](const events::AgentTransition&) -> std::string_view { return "agent_transition"; },
          [](const events::TrackingLost&) -> std::string_view { return "tracking_lost"; },
          [](const events::TrackingRecovered&) -> std::string_view {
            return "tracking_recovered";
          },
      },
      p);
}

std::string_view GameEvent::kind() const { return event_kind_name(payload); }

std::optional<std::size_t> GameState::active_task() const {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].status == TaskStatus::Active) return i;
  }
  return std::nullopt;
}

GameState make_initial_state(const GameConfig& cfg) {
  GameState s;
  s.fish.pos = cfg.initial_fish_position();
  s.fish.behavior = BehaviorKind::Wander;
  const Vec3 c = cfg.tank_bounds().center();
  s.hand.pos = {c.x, c.y, 0.0};
  s.tasks.reserve(cfg.tasks.size());
  for (Zone z : cfg.tasks) s.tasks.push_back({z, TaskStatus::Pending, {}, {}});
  s.history = SampleHistory(std::max(cfg.filter.velocity_window, cfg.filter.dropout_timeout));
  return s;
}

std::vector<GameEvent> start_session(GameState& state, const GameConfig&) {
  std::vector<GameEvent> out;
  out.push_back({state.t, state.tick, events::SessionStarted{}});
  if (!state.tasks.empty() && !state.active_task()) {
    for (std::size_t i = 0; i < state.tasks.size(); ++i) {
      if (state.tasks[i].status == TaskStatus::Pending) {
        state.tasks[i].status = TaskStatus::Active;
        state.tasks[i].started_at = state.t;
        out.push_back({state.t, state.tick, events::TaskActivated{i, state.tasks[i].start_zone}});
        break;
      }
    }
  }
  return out;
}

GameEvent end_session(const GameState& state) {
  return {state.t, state.tick, events::SessionEnded{state.tick}};
}

TouchUpdate update_touch(const TouchProgress& p, double distance, const GameConfig& cfg,
                         double dt, Zone touch_zone) {
  TouchUpdate out;
  TouchProgress next = p;
  const bool contact = distance <= cfg.touch_radius;

  if (contact && !p.in_contact) out.events.emplace_back(events::TouchStarted{touch_zone});
  if (!contact && p.in_contact) {
    out.events.emplace_back(events::TouchBroken{p.fraction});
    next.refractory = false;
  }
  next.in_contact = contact;

  if (!contact) {
    next.fraction = 0.0;
  } else if (!next.refractory) {
    next.fraction = std::min(1.0, next.fraction + dt / cfg.fill_duration);
    if (next.fraction >= 1.0 - kFillEpsilon) {
      out.events.emplace_back(events::TouchEndorsed{});
      next.fraction = 0.0;
      next.refractory = true;
    }
  }
  out.progress = next;
  return out;
}

TaskUpdate update_tasks(const std::vector<ExerciseTask>& tasks, std::optional<Zone> attempt_zone,
                        bool endorsed, double t) {
  TaskUpdate out{tasks, {}};
  if (!endorsed || !attempt_zone) return out;
  auto active = std::find_if(out.tasks.begin(), out.tasks.end(),
                             [](const ExerciseTask& x) { return x.status == TaskStatus::Active; });
  if (active == out.tasks.end() || active->start_zone != *attempt_zone) return out;

  const auto index = static_cast<std::size_t>(active - out.tasks.begin());
  active->status = TaskStatus::Completed;
  active->completed_at = t;
  out.events.emplace_back(
      events::TaskCompleted{index, active->start_zone, t - active->started_at.value_or(t)});

  auto pending = std::find_if(active + 1, out.tasks.end(),
                              [](const ExerciseTask& x) { return x.status == TaskStatus::Pending; });
  if (pending != out.tasks.end()) {
    pending->status = TaskStatus::Active;
    pending->started_at = t;
    out.events.emplace_back(events::TaskActivated{
        static_cast<std::size_t>(pending - out.tasks.begin()), pending->start_zone});
  }
  return out;
}

TickResult tick(const GameState& state, std::span<const RawSample> new_samples,
                const GameConfig& cfg, Rng& rng) {
  TickResult out{state, {}};
  GameState& next = out.state;
  const double dt = cfg.dt();
  next.tick = state.tick + 1;
  next.t = static_cast<double>(next.tick) / cfg.tick_rate;
  auto emit = [&](EventPayload p) { out.events.push_back({next.t, next.tick, std::move(p)}); };

  // (1) hand estimate
  for (const auto& s : new_samples) next.history.push(s);
  bool lost = false;
  try {
    next.hand = estimate_state(next.history.samples(), cfg.calibration, cfg.filter, next.t);
  } catch (const mrr::TrackingLost&) {
    lost = true;
    next.hand.vel = {};
    next.hand.speed = 0.0;
    next.hand.t = next.t;
  }
  if (lost && !state.tracking_lost) emit(events::TrackingLost{});
  if (!lost && state.tracking_lost) emit(events::TrackingRecovered{});
  next.tracking_lost = lost;

  // (2) difficulty agent; dwell accumulators pause while tracking is lost
  if (!lost) {
    const Observation obs = observe(state.agent, next.hand, cfg.difficulty, dt);
    next.agent = obs.state;
    if (obs.transition) {
      emit(events::AgentTransition{obs.transition->from, obs.transition->to,
                                   obs.transition->trigger_speed});
    }
  }

  // (3) fish
  next.fish.behavior = behavior_for(next.agent.mode);
  next.fish = step(next.fish, next.hand, cfg.behavior, cfg.tank_bounds(), rng, dt);

  // (4) touch; a hand without tracking lock cannot be in contact
  const double distance = lost ? std::numeric_limits<double>::infinity()
                               : planar_distance(next.hand.pos, next.fish.pos);
  const Zone hand_zone = zone_of(next.hand.pos, cfg.tank_bounds());
  TouchUpdate touch = update_touch(state.progress, distance, cfg, dt, hand_zone);
  next.progress = touch.progress;
  bool endorsed = false;
  for (auto& e : touch.events) {
    if (std::holds_alternative<events::TouchStarted>(e)) next.attempt_zone = hand_zone;
    if (auto* en = std::get_if<events::TouchEndorsed>(&e)) {
      endorsed = true;
      en->count = ++next.endorsed_touch_count;
    }
    emit(std::move(e));
  }

  // (5) tasks
  TaskUpdate tasks = update_tasks(next.tasks, next.attempt_zone, endorsed, next.t);
  next.tasks = std::move(tasks.tasks);
  for (auto& e : tasks.events) emit(std::move(e));
  return out;
}

}  // namespace mrr
