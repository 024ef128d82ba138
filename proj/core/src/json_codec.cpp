#include "mrr/json_codec.hpp"

#include <cmath>

#include "mrr/errors.hpp"

namespace mrr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

template <typename Enum, typename Parse>
Enum read_enum(const JsonReader& r, Parse parse) {
  const std::string s = r.string();
  try {
    return parse(s);
  } catch (const Error&) {
    r.fail("unknown value '" + s + "'");
  }
}

}  // namespace

bool JsonReader::has(std::string_view key) const {
  return j_.is_object() && j_.contains(key);
}

JsonReader JsonReader::at(std::string_view key) const {
  require_object();
  auto it = j_.find(key);
  const std::string child = path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  if (it == j_.end()) throw DecodeError(child + ": missing field");
  return JsonReader(*it, child, strict_);
}

JsonReader JsonReader::at(std::size_t index) const {
  require_array();
  if (index >= j_.size()) fail("index out of range");
  return JsonReader(j_[index], path_ + "[" + std::to_string(index) + "]", strict_);
}

std::size_t JsonReader::size() const {
  require_array();
  return j_.size();
}

double JsonReader::number() const {
  if (!j_.is_number()) fail("expected a number");
  const double v = j_.get<double>();
  if (!std::isfinite(v)) fail("expected a finite number");
  return v;
}

bool JsonReader::boolean() const {
  if (!j_.is_boolean()) fail("expected true or false");
  return j_.get<bool>();
}

std::string JsonReader::string() const {
  if (!j_.is_string()) fail("expected a string");
  return j_.get<std::string>();
}

std::uint64_t JsonReader::uint() const {
  if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
  if (j_.is_number_integer() && j_.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j_.get<std::int64_t>());
  }
  fail("expected a non-negative integer");
}

void JsonReader::read(std::string_view key, double& out) const {
  if (has(key)) out = number(key);
}
void JsonReader::read(std::string_view key, bool& out) const {
  if (has(key)) out = boolean(key);
}
void JsonReader::read(std::string_view key, std::uint64_t& out) const {
  if (has(key)) out = uint(key);
}

void JsonReader::require_object() const {
  if (!j_.is_object()) fail("expected an object");
}

void JsonReader::require_array() const {
  if (!j_.is_array()) fail("expected an array");
}

void JsonReader::expect_only(std::initializer_list<std::string_view> allowed) const {
  require_object();
  if (!strict_) return;
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) {
      const std::string child = path_.empty() ? it.key() : path_ + "." + it.key();
      throw DecodeError(child + ": unknown field");
    }
  }
}

void JsonReader::fail(std::string_view msg) const {
  throw DecodeError((path_.empty() ? std::string("<root>") : path_) + ": " + std::string(msg));
}

// ---- encoders -------------------------------------------------------------

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json to_json(const Aabb& b) { return {{"min", to_json(b.min)}, {"max", to_json(b.max)}}; }

Json to_json(const RawSample& s) {
  return {{"t", s.t}, {"u", s.u}, {"v", s.v}, {"valid", s.valid}};
}

Json to_json(const HandState& h) {
  return {{"pos", to_json(h.pos)}, {"vel", to_json(h.vel)}, {"speed", h.speed}, {"t", h.t}};
}

Json to_json(const FishState& f) {
  return {{"pos", to_json(f.pos)}, {"vel", to_json(f.vel)}, {"behavior", to_string(f.behavior)}};
}

Json to_json(const AgentState& a) {
  return {{"mode", to_string(a.mode)},
          {"dwell_below", a.dwell_below},
          {"dwell_above", a.dwell_above},
          {"dwell_inside", a.dwell_inside}};
}

Json to_json(const TouchProgress& p) {
  return {{"fraction", p.fraction}, {"in_contact", p.in_contact}, {"refractory", p.refractory}};
}

Json to_json(const ExerciseTask& t) {
  Json j = {{"start_zone", to_string(t.start_zone)}, {"status", to_string(t.status)}};
  j["started_at"] = t.started_at ? Json(*t.started_at) : Json(nullptr);
  j["completed_at"] = t.completed_at ? Json(*t.completed_at) : Json(nullptr);
  return j;
}

Json to_json(const CalibrationMap& m) {
  return {{"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d}, {"e", m.e}, {"f", m.f}};
}

Json to_json(const FilterConfig& c) {
  return {{"alpha", c.alpha},
          {"velocity_window", c.velocity_window},
          {"dropout_timeout", c.dropout_timeout}};
}

Json to_json(const BehaviorParams& p) {
  return {{"max_speed", p.max_speed},
          {"max_accel", p.max_accel},
          {"wander_radius", p.wander_radius},
          {"wander_center", to_json(p.wander_center)},
          {"wander_jitter", p.wander_jitter},
          {"rng_seed", p.rng_seed}};
}

Json to_json(const DifficultyConfig& c) {
  return {{"v_min", c.v_min},
          {"v_max", c.v_max},
          {"t_low", c.t_low},
          {"t_high", c.t_high},
          {"t_return", c.t_return}};
}

Json to_json(const GameConfig& c) {
  Json tasks = Json::array();
  for (Zone z : c.tasks) tasks.push_back(to_string(z));
  return {{"tank", to_json(c.tank)},
          {"tank_anchor", to_json(c.tank_anchor)},
          {"touch_radius", c.touch_radius},
          {"fill_duration", c.fill_duration},
          {"tick_rate", c.tick_rate},
          {"broadcast_rate", c.broadcast_rate},
          {"trace_rate", c.trace_rate},
          {"fish_start", c.fish_start ? to_json(*c.fish_start) : Json(nullptr)},
          {"behavior", to_json(c.behavior)},
          {"difficulty", to_json(c.difficulty)},
          {"filter", to_json(c.filter)},
          {"calibration", to_json(c.calibration)},
          {"tasks", tasks}};
}

Json to_json(const GameEvent& e) {
  Json j = {{"t", e.t}, {"tick", e.tick}, {"kind", e.kind()}};
  std::visit(Overloaded{
                 [](const events::SessionStarted&) {},
                 [&](const events::SessionEnded& p) { j["ticks"] = p.ticks; },
                 [&](const events::TouchStarted& p) { j["zone"] = to_string(p.zone); },
                 [&](const events::TouchBroken& p) { j["fraction"] = p.fraction; },
                 [&](const events::TouchEndorsed& p) { j["count"] = p.count; },
                 [&](const events::TaskActivated& p) {
                   j["index"] = p.index;
                   j["zone"] = to_string(p.zone);
                 },
                 [&](const events::TaskCompleted& p) {
                   j["index"] = p.index;
                   j["zone"] = to_string(p.zone);
                   j["duration"] = p.duration;
                 },
                 [&](const events::AgentTransition& p) {
                   j["from"] = to_string(p.from);
                   j["to"] = to_string(p.to);
                   j["trigger_speed"] = p.trigger_speed;
                 },
                 [](const events::TrackingLost&) {},
                 [](const events::TrackingRecovered&) {},
             },
             e.payload);
  return j;
}

Json to_json(const DifficultyPatch& p) {
  Json j = Json::object();
  if (p.v_min) j["v_min"] = *p.v_min;
  if (p.v_max) j["v_max"] = *p.v_max;
  if (p.t_low) j["t_low"] = *p.t_low;
  if (p.t_high) j["t_high"] = *p.t_high;
  if (p.t_return) j["t_return"] = *p.t_return;
  return j;
}

// ---- decoders -------------------------------------------------------------

Vec3 read_vec3(const JsonReader& r) {
  if (r.json().is_array()) {
    if (r.size() != 3) r.fail("expected [x, y, z]");
    return {r.at(std::size_t{0}).number(), r.at(std::size_t{1}).number(),
            r.at(std::size_t{2}).number()};
  }
  r.fail("expected [x, y, z]");
}

Aabb read_aabb(const JsonReader& r) {
  r.expect_only({"min", "max"});
  return {read_vec3(r.at("min")), read_vec3(r.at("max"))};
}

RawSample read_raw_sample(const JsonReader& r) {
  r.expect_only({"t", "u", "v", "valid"});
  return {r.number("t"), r.number("u"), r.number("v"), r.boolean("valid")};
}

HandState read_hand_state(const JsonReader& r) {
  r.expect_only({"pos", "vel", "speed", "t"});
  return {read_vec3(r.at("pos")), read_vec3(r.at("vel")), r.number("speed"), r.number("t")};
}

FishState read_fish_state(const JsonReader& r) {
  r.expect_only({"pos", "vel", "behavior"});
  return {read_vec3(r.at("pos")), read_vec3(r.at("vel")),
          read_enum<BehaviorKind>(r.at("behavior"), behavior_from_string)};
}

AgentState read_agent_state(const JsonReader& r) {
  r.expect_only({"mode", "dwell_below", "dwell_above", "dwell_inside"});
  return {read_enum<AgentMode>(r.at("mode"), agent_mode_from_string), r.number("dwell_below"),
          r.number("dwell_above"), r.number("dwell_inside")};
}

TouchProgress read_touch_progress(const JsonReader& r) {
  r.expect_only({"fraction", "in_contact", "refractory"});
  TouchProgress p;
  p.fraction = r.number("fraction");
  p.in_contact = r.boolean("in_contact");
  r.read("refractory", p.refractory);
  return p;
}

ExerciseTask read_exercise_task(const JsonReader& r) {
  r.expect_only({"start_zone", "status", "started_at", "completed_at"});
  ExerciseTask t;
  t.start_zone = read_enum<Zone>(r.at("start_zone"), zone_from_string);
  t.status = read_enum<TaskStatus>(r.at("status"), task_status_from_string);
  if (r.has("started_at") && !r.json().at("started_at").is_null()) {
    t.started_at = r.number("started_at");
  }
  if (r.has("completed_at") && !r.json().at("completed_at").is_null()) {
    t.completed_at = r.number("completed_at");
  }
  return t;
}

CalibrationMap read_calibration(const JsonReader& r, CalibrationMap m) {
  r.expect_only({"a", "b", "c", "d", "e", "f"});
  r.read("a", m.a);
  r.read("b", m.b);
  r.read("c", m.c);
  r.read("d", m.d);
  r.read("e", m.e);
  r.read("f", m.f);
  return m;
}

FilterConfig read_filter_config(const JsonReader& r, FilterConfig c) {
  r.expect_only({"alpha", "velocity_window", "dropout_timeout"});
  r.read("alpha", c.alpha);
  r.read("velocity_window", c.velocity_window);
  r.read("dropout_timeout", c.dropout_timeout);
  return c;
}

BehaviorParams read_behavior_params(const JsonReader& r, BehaviorParams p) {
  r.expect_only(
      {"max_speed", "max_accel", "wander_radius", "wander_center", "wander_jitter", "rng_seed"});
  r.read("max_speed", p.max_speed);
  r.read("max_accel", p.max_accel);
  r.read("wander_radius", p.wander_radius);
  if (r.has("wander_center")) p.wander_center = read_vec3(r.at("wander_center"));
  r.read("wander_jitter", p.wander_jitter);
  r.read("rng_seed", p.rng_seed);
  return p;
}

DifficultyConfig read_difficulty_config(const JsonReader& r, DifficultyConfig c) {
  r.expect_only({"v_min", "v_max", "t_low", "t_high", "t_return"});
  r.read("v_min", c.v_min);
  r.read("v_max", c.v_max);
  r.read("t_low", c.t_low);
  r.read("t_high", c.t_high);
  r.read("t_return", c.t_return);
  return c;
}

GameConfig read_game_config(const JsonReader& r, GameConfig c) {
  r.expect_only({"tank", "tank_anchor", "touch_radius", "fill_duration", "tick_rate",
                 "broadcast_rate", "trace_rate", "fish_start", "behavior", "difficulty", "filter",
                 "calibration", "tasks"});
  if (r.has("tank")) c.tank = read_aabb(r.at("tank"));
  if (r.has("tank_anchor")) c.tank_anchor = read_vec3(r.at("tank_anchor"));
  r.read("touch_radius", c.touch_radius);
  r.read("fill_duration", c.fill_duration);
  r.read("tick_rate", c.tick_rate);
  r.read("broadcast_rate", c.broadcast_rate);
  r.read("trace_rate", c.trace_rate);
  if (r.has("fish_start")) {
    const JsonReader fs = r.at("fish_start");
    c.fish_start = fs.json().is_null() ? std::nullopt : std::optional<Vec3>(read_vec3(fs));
  }
  if (r.has("behavior")) c.behavior = read_behavior_params(r.at("behavior"), c.behavior);
  if (r.has("difficulty")) c.difficulty = read_difficulty_config(r.at("difficulty"), c.difficulty);
  if (r.has("filter")) c.filter = read_filter_config(r.at("filter"), c.filter);
  if (r.has("calibration")) c.calibration = read_calibration(r.at("calibration"), c.calibration);
  if (r.has("tasks")) {
    const JsonReader tasks = r.at("tasks");
    c.tasks.clear();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      c.tasks.push_back(read_enum<Zone>(tasks.at(i), zone_from_string));
    }
  }
  return c;
}

GameEvent read_game_event(const JsonReader& r) {
  r.require_object();
  GameEvent e;
  e.t = r.number("t");
  e.tick = r.uint("tick");
  const std::string kind = r.string("kind");
  auto zone = [&](std::string_view key) { return read_enum<Zone>(r.at(key), zone_from_string); };
  auto mode = [&](std::string_view key) {
    return read_enum<AgentMode>(r.at(key), agent_mode_from_string);
  };
  if (kind == "session_started") {
    r.expect_only({"t", "tick", "kind"});
    e.payload = events::SessionStarted{};
  } else if (kind == "session_ended") {
    r.expect_only({"t", "tick", "kind", "ticks"});
    e.payload = events::SessionEnded{r.uint("ticks")};
  } else if (kind == "touch_started") {
    r.expect_only({"t", "tick", "kind", "zone"});
    e.payload = events::TouchStarted{zone("zone")};
  } else if (kind == "touch_broken") {
    r.expect_only({"t", "tick", "kind", "fraction"});
    e.payload = events::TouchBroken{r.number("fraction")};
  } else if (kind == "touch_endorsed") {
    r.expect_only({"t", "tick", "kind", "count"});
    e.payload = events::TouchEndorsed{r.uint("count")};
  } else if (kind == "task_activated") {
    r.expect_only({"t", "tick", "kind", "index", "zone"});
    e.payload = events::TaskActivated{static_cast<std::size_t>(r.uint("index")), zone("zone")};
  } else if (kind == "task_completed") {
    r.expect_only({"t", "tick", "kind", "index", "zone", "duration"});
    e.payload = events::TaskCompleted{static_cast<std::size_t>(r.uint("index")), zone("zone"),
                                      r.number("duration")};
  } else if (kind == "agent_transition") {
    r.expect_only({"t", "tick", "kind", "from", "to", "trigger_speed"});
    e.payload = events::AgentTransition{mode("from"), mode("to"), r.number("trigger_speed")};
  } else if (kind == "tracking_lost") {
    r.expect_only({"t", "tick", "kind"});
    e.payload = events::TrackingLost{};
  } else if (kind == "tracking_recovered") {
    r.expect_only({"t", "tick", "kind"});
    e.payload = events::TrackingRecovered{};
  } else {
    r.at("kind").fail("unknown event kind '" + kind + "'");
  }
  return e;
}

DifficultyPatch read_difficulty_patch(const JsonReader& r) {
  r.expect_only({"v_min", "v_max", "t_low", "t_high", "t_return"});
  DifficultyPatch p;
  auto opt = [&](std::string_view key, std::optional<double>& out) {
    if (r.has(key)) out = r.number(key);
  };
  opt("v_min", p.v_min);
  opt("v_max", p.v_max);
  opt("t_low", p.t_low);
  opt("t_high", p.t_high);
  opt("t_return", p.t_return);
  return p;
}

}  // namespace mrr
