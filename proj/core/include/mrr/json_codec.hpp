#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mrr/difficulty_agent.hpp"
#include "mrr/game_core.hpp"
#include "mrr/input_capture.hpp"
#include "mrr/steering.hpp"

namespace mrr {

using Json = nlohmann::json;

// Field-path aware view over a JSON value. Missing optional fields keep the
// caller's default; in strict mode unknown object keys are rejected.
class JsonReader {
 public:
  JsonReader(const Json& j, std::string path, bool strict)
      : j_(j), path_(std::move(path)), strict_(strict) {}

  const Json& json() const { return j_; }
  const std::string& path() const { return path_; }
  bool strict() const { return strict_; }
  bool has(std::string_view key) const;

  JsonReader at(std::string_view key) const;
  JsonReader at(std::size_t index) const;
  std::size_t size() const;

  double number() const;
  bool boolean() const;
  std::string string() const;
  std::uint64_t uint() const;

  double number(std::string_view key) const { return at(key).number(); }
  bool boolean(std::string_view key) const { return at(key).boolean(); }
  std::string string(std::string_view key) const { return at(key).string(); }
  std::uint64_t uint(std::string_view key) const { return at(key).uint(); }

  void read(std::string_view key, double& out) const;
  void read(std::string_view key, bool& out) const;
  void read(std::string_view key, std::uint64_t& out) const;

  void require_object() const;
  void require_array() const;
  // In strict mode, throws if the object holds a key outside `allowed`.
  void expect_only(std::initializer_list<std::string_view> allowed) const;

  [[noreturn]] void fail(std::string_view msg) const;

 private:
  const Json& j_;
  std::string path_;
  bool strict_;
};

Json to_json(const Vec3& v);
Json to_json(const Aabb& b);
Json to_json(const RawSample& s);
Json to_json(const HandState& h);
Json to_json(const FishState& f);
Json to_json(const AgentState& a);
Json to_json(const TouchProgress& p);
Json to_json(const ExerciseTask& t);
Json to_json(const CalibrationMap& m);
Json to_json(const FilterConfig& c);
Json to_json(const BehaviorParams& p);
Json to_json(const DifficultyConfig& c);
Json to_json(const GameConfig& c);
Json to_json(const GameEvent& e);
Json to_json(const DifficultyPatch& p);

Vec3 read_vec3(const JsonReader& r);
Aabb read_aabb(const JsonReader& r);
RawSample read_raw_sample(const JsonReader& r);
HandState read_hand_state(const JsonReader& r);
FishState read_fish_state(const JsonReader& r);
AgentState read_agent_state(const JsonReader& r);
TouchProgress read_touch_progress(const JsonReader& r);
ExerciseTask read_exercise_task(const JsonReader& r);
CalibrationMap read_calibration(const JsonReader& r, CalibrationMap base = {});
FilterConfig read_filter_config(const JsonReader& r, FilterConfig base = {});
BehaviorParams read_behavior_params(const JsonReader& r, BehaviorParams base = {});
DifficultyConfig read_difficulty_config(const JsonReader& r, DifficultyConfig base = {});
// Fields absent from the JSON keep the values of `base`.
GameConfig read_game_config(const JsonReader& r, GameConfig base = {});
GameEvent read_game_event(const JsonReader& r);
DifficultyPatch read_difficulty_patch(const JsonReader& r);

}  // namespace mrr
