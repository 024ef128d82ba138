#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrr/game_core.hpp"
#include "mrr/input_capture.hpp"
#include "mrr/json_codec.hpp"
#include "mrr/protocol.hpp"
#include "mrr/rng.hpp"
#include "mrr/vec3.hpp"

namespace mrr {

// Parametric simulated patient. Positions live in the table plane (z = 0).
struct PatientModel {
  std::string name = "patient";
  double max_speed = 0.1;         // m/s
  double reaction_delay = 0.2;    // s
  double tremor_amplitude = 0.0;  // m
  double tremor_frequency = 5.0;  // Hz
  double tremor_noise = 0.0;      // m, sd of per-sample jitter
  Aabb envelope{{0.0, 0.0, 0.0}, {0.8, 0.5, 0.0}};
  double fatigue_rate = 0.0;      // fraction of max_speed lost per minute
  std::uint64_t rng_seed = 1;
  // > 0: circle the fish at this radius instead of closing in. Keeps the
  // hand moving at full capability for as long as the fish is reachable.
  double orbit_radius = 0.0;
  std::optional<Vec3> start;      // defaults to the envelope center

  void validate() const;
  friend bool operator==(const PatientModel&, const PatientModel&) = default;
};

Json to_json(const PatientModel& m);
PatientModel read_patient_model(const JsonReader& r);
PatientModel parse_patient_model(std::string_view json_text);
PatientModel load_patient_model(const std::filesystem::path& path);

// `name_or_path` is either a JSON file or a profile name looked up as
// <dir>/<name>.json. Throws ConfigError when nothing matches.
PatientModel find_patient_profile(const std::string& name_or_path,
                                  const std::filesystem::path& profiles_dir);

class PatientSim {
 public:
  PatientSim(PatientModel m, std::uint64_t seed);

  void set_calibration(const CalibrationMap& map) { calibration_ = map; }
  void observe(const protocol::StateUpdate& u);

  // One camera-space sample at time t (monotone). The hand moves toward
  // the fish as last seen `reaction_delay` ago, capped by the fatigued
  // capability, then tremor is superimposed and the result clipped to the
  // reach envelope.
  RawSample step(double t);

  double capability(double t) const;
  // Hand position before tremor.
  const Vec3& intent() const { return intent_; }
  // Emitted hand position in game space.
  const Vec3& emitted() const { return emitted_; }
  const PatientModel& model() const { return model_; }

 private:
  std::optional<Vec3> delayed_target(double t);

  PatientModel model_;
  Rng rng_;
  CalibrationMap calibration_;
  std::deque<std::pair<double, Vec3>> seen_;
  Vec3 intent_;
  Vec3 emitted_;
  std::optional<double> last_t_;
};

struct SimulationOptions {
  double duration = 60.0;  // s
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::string session_id = "sim";
  // Called after every tick with the authoritative state.
  std::function<void(const GameState&)> on_tick;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::uint64_t ticks = 0;
  std::vector<GameEvent> events;  // as received by the simulated client
  std::size_t state_updates = 0;
  GameState final_state;
};

// Runs a complete headless session: the patient connects as a protocol
// client over the loopback transport, starts the session, streams one
// sample per tick and ends it after `duration`.
SimulationResult run_simulation(const GameConfig& cfg, const PatientModel& patient,
                                const SimulationOptions& opts);

}  // namespace mrr
