#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mrr/difficulty_agent.hpp"
#include "mrr/input_capture.hpp"
#include "mrr/rng.hpp"
#include "mrr/steering.hpp"
#include "mrr/vec3.hpp"

namespace mrr {

// Quadrants of the table plane. "Bottom" is the patient side (low y).
enum class Zone { BottomRight, BottomLeft, UpperRight, UpperLeft };
enum class TaskStatus { Pending, Active, Completed };

std::string_view to_string(Zone z);
Zone zone_from_string(std::string_view s);
std::string_view to_string(TaskStatus s);
TaskStatus task_status_from_string(std::string_view s);

// Quadrant of `pos` in the table plane of `tank`. Points on the vertical
// midline count as right, on the horizontal midline as upper.
Zone zone_of(const Vec3& pos, const Aabb& tank);

struct ExerciseTask {
  Zone start_zone = Zone::BottomRight;
  TaskStatus status = TaskStatus::Pending;
  std::optional<double> started_at;
  std::optional<double> completed_at;

  friend bool operator==(const ExerciseTask&, const ExerciseTask&) = default;
};

struct GameConfig {
  Aabb tank{{0.0, 0.0, 0.0}, {0.8, 0.5, 0.3}};  // tank-local bounds
  Vec3 tank_anchor{};                           // game-space offset of tank-local origin
  double touch_radius = 0.05;                   // m, measured in the table plane
  double fill_duration = 1.5;                   // s
  double tick_rate = 60.0;                      // Hz
  double broadcast_rate = 20.0;                 // Hz
  double trace_rate = 10.0;                     // Hz, stored hand trace
  std::optional<Vec3> fish_start;               // defaults to the wander center
  BehaviorParams behavior;
  DifficultyConfig difficulty;
  FilterConfig filter;
  CalibrationMap calibration{0.8, 0.0, 0.0, 0.0, 0.5, 0.0};
  std::vector<Zone> tasks{Zone::BottomRight, Zone::BottomLeft, Zone::UpperRight,
                          Zone::UpperLeft};

  Aabb tank_bounds() const { return {tank.min + tank_anchor, tank.max + tank_anchor}; }
  double dt() const { return 1.0 / tick_rate; }
  Vec3 initial_fish_position() const { return fish_start.value_or(behavior.wander_center); }

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct TouchProgress {
  double fraction = 0.0;
  bool in_contact = false;
  // Set after an endorsement; cleared by the next contact break.
  bool refractory = false;

  friend bool operator==(const TouchProgress&, const TouchProgress&) = default;
};

namespace events {
struct SessionStarted {
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};
struct SessionEnded {
  std::uint64_t ticks = 0;
  friend bool operator==(const SessionEnded&, const SessionEnded&) = default;
};
struct TouchStarted {
  Zone zone = Zone::BottomRight;  // hand zone when contact began
  friend bool operator==(const TouchStarted&, const TouchStarted&) = default;
};
struct TouchBroken {
  double fraction = 0.0;  // progress lost by the break
  friend bool operator==(const TouchBroken&, const TouchBroken&) = default;
};
struct TouchEndorsed {
  std::uint64_t count = 0;  // endorsed touches so far, this one included
  friend bool operator==(const TouchEndorsed&, const TouchEndorsed&) = default;
};
struct TaskActivated {
  std::size_t index = 0;
  Zone zone = Zone::BottomRight;
  friend bool operator==(const TaskActivated&, const TaskActivated&) = default;
};
struct TaskCompleted {
  std::size_t index = 0;
  Zone zone = Zone::BottomRight;
  double duration = 0.0;
  friend bool operator==(const TaskCompleted&, const TaskCompleted&) = default;
};
struct AgentTransition {
  AgentMode from = AgentMode::Wander;
  AgentMode to = AgentMode::Wander;
  double trigger_speed = 0.0;
  friend bool operator==(const AgentTransition&, const AgentTransition&) = default;
};
struct TrackingLost {
  friend bool operator==(const TrackingLost&, const TrackingLost&) = default;
};
struct TrackingRecovered {
  friend bool operator==(const TrackingRecovered&, const TrackingRecovered&) = default;
};
}  // namespace events

using EventPayload =
    std::variant<events::SessionStarted, events::SessionEnded, events::TouchStarted,
                 events::TouchBroken, events::TouchEndorsed, events::TaskActivated,
                 events::TaskCompleted, events::AgentTransition, events::TrackingLost,
                 events::TrackingRecovered>;

struct GameEvent {
  double t = 0.0;
  std::uint64_t tick = 0;
  EventPayload payload;

  std::string_view kind() const;
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(payload);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(payload);
  }
  friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

std::string_view event_kind_name(const EventPayload& p);

struct GameState {
  std::uint64_t tick = 0;
  double t = 0.0;
  FishState fish;
  HandState hand;
  AgentState agent;
  TouchProgress progress;
  std::vector<ExerciseTask> tasks;
  std::uint64_t endorsed_touch_count = 0;
  bool tracking_lost = true;
  std::optional<Zone> attempt_zone;  // hand zone when the current contact began
  SampleHistory history;

  // Index of the Active task, if any.
  std::optional<std::size_t> active_task() const;
  friend bool operator==(const GameState&, const GameState&) = default;
};

struct TickResult {
  GameState state;
  std::vector<GameEvent> events;
};

struct TouchUpdate {
  TouchProgress progress;
  std::vector<EventPayload> events;
};

struct TaskUpdate {
  std::vector<ExerciseTask> tasks;
  std::vector<EventPayload> events;
};

// Fresh session state: tick 0, fish at its start position, no tracking lock.
GameState make_initial_state(const GameConfig& cfg);

// Marks the session started and activates the first task.
std::vector<GameEvent> start_session(GameState& state, const GameConfig& cfg);

// Closing event for the session.
GameEvent end_session(const GameState& state);

// Contact progression. Fill grows by dt / fill_duration while in contact,
// resets on a break, and after an endorsement waits for a break before a
// new fill can start. `touch_zone` is reported with TouchStarted.
TouchUpdate update_touch(const TouchProgress& p, double distance, const GameConfig& cfg,
                         double dt, Zone touch_zone = Zone::BottomRight);

// Completes the Active task when a touch was endorsed and the attempt began
// in the task's start zone, then activates the next pending task.
TaskUpdate update_tasks(const std::vector<ExerciseTask>& tasks, std::optional<Zone> attempt_zone,
                        bool endorsed, double t);

// One authoritative world update at dt = 1 / tick_rate:
// estimate hand, observe agent, step fish, update touch, update tasks.
TickResult tick(const GameState& state, std::span<const RawSample> new_samples,
                const GameConfig& cfg, Rng& rng);

}  // namespace mrr
