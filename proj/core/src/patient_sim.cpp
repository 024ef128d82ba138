#include "mrr/patient_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mrr/errors.hpp"
#include "mrr/session.hpp"

namespace mrr {

void PatientModel::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (!(max_speed >= 0.0) || !std::isfinite(max_speed)) bad("max_speed", "must be >= 0");
  if (!(reaction_delay >= 0.0)) bad("reaction_delay", "must be >= 0");
  if (!(tremor_amplitude >= 0.0)) bad("tremor_amplitude", "must be >= 0");
  if (!(tremor_frequency >= 0.0)) bad("tremor_frequency", "must be >= 0");
  if (!(tremor_noise >= 0.0)) bad("tremor_noise", "must be >= 0");
  if (envelope.empty()) bad("envelope", "must be non-empty");
  if (envelope.min.z != 0.0 || envelope.max.z != 0.0) bad("envelope", "must lie in the table plane");
  if (!(fatigue_rate >= 0.0)) bad("fatigue_rate", "must be >= 0");
  if (!(orbit_radius >= 0.0)) bad("orbit_radius", "must be >= 0");
  if (start && !envelope.contains(*start)) bad("start", "must lie inside the envelope");
}

Json to_json(const PatientModel& m) {
  Json j{{"name", m.name},
         {"max_speed", m.max_speed},
         {"reaction_delay", m.reaction_delay},
         {"tremor_amplitude", m.tremor_amplitude},
         {"tremor_frequency", m.tremor_frequency},
         {"tremor_noise", m.tremor_noise},
         {"envelope", to_json(m.envelope)},
         {"fatigue_rate", m.fatigue_rate},
         {"rng_seed", m.rng_seed},
         {"orbit_radius", m.orbit_radius}};
  if (m.start) j["start"] = to_json(*m.start);
  return j;
}

PatientModel read_patient_model(const JsonReader& r) {
  r.require_object();
  r.expect_only({"name", "max_speed", "reaction_delay", "tremor_amplitude", "tremor_frequency",
                 "tremor_noise", "envelope", "fatigue_rate", "rng_seed", "orbit_radius",
                 "start"});
  PatientModel m;
  if (r.has("name")) m.name = r.string("name");
  r.read("max_speed", m.max_speed);
  r.read("reaction_delay", m.reaction_delay);
  r.read("tremor_amplitude", m.tremor_amplitude);
  r.read("tremor_frequency", m.tremor_frequency);
  r.read("tremor_noise", m.tremor_noise);
  if (r.has("envelope")) m.envelope = read_aabb(r.at("envelope"));
  r.read("fatigue_rate", m.fatigue_rate);
  r.read("rng_seed", m.rng_seed);
  r.read("orbit_radius", m.orbit_radius);
  if (r.has("start")) m.start = read_vec3(r.at("start"));
  return m;
}

PatientModel parse_patient_model(std::string_view json_text) {
  Json j = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("patient profile is not valid JSON");
  PatientModel m;
  try {
    m = read_patient_model(JsonReader(j, "", true));
  } catch (const DecodeError& e) {
    throw ConfigError(e.what());
  }
  m.validate();
  return m;
}

PatientModel load_patient_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open patient profile " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_patient_model(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

PatientModel find_patient_profile(const std::string& name_or_path,
                                  const std::filesystem::path& profiles_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(name_or_path, ec)) return load_patient_model(name_or_path);
  const fs::path named = profiles_dir / (name_or_path + ".json");
  if (fs::is_regular_file(named, ec)) return load_patient_model(named);
  throw ConfigError("unknown patient profile '" + name_or_path + "' (looked in " +
                    profiles_dir.string() + ")");
}

PatientSim::PatientSim(PatientModel m, std::uint64_t seed)
    : model_(std::move(m)), rng_(mix_seed(model_.rng_seed, seed)) {
  model_.validate();
  intent_ = model_.start.value_or(model_.envelope.center());
  emitted_ = intent_;
}

void PatientSim::observe(const protocol::StateUpdate& u) {
  if (!seen_.empty() && u.t < seen_.back().first) return;
  seen_.emplace_back(u.t, Vec3{u.fish_pos.x, u.fish_pos.y, 0.0});
}

std::optional<Vec3> PatientSim::delayed_target(double t) {
  const double horizon = t - model_.reaction_delay;
  // Keep the newest update at or before the horizon plus everything after.
  while (seen_.size() >= 2 && seen_[1].first <= horizon) seen_.pop_front();
  if (seen_.empty() || seen_.front().first > horizon) return std::nullopt;
  return seen_.front().second;
}

double PatientSim::capability(double t) const {
  return model_.max_speed * std::max(0.0, 1.0 - model_.fatigue_rate * t / 60.0);
}

RawSample PatientSim::step(double t) {
  const double dt = last_t_ ? std::max(0.0, t - *last_t_) : 0.0;
  last_t_ = t;
  const double reach = capability(t) * dt;

  if (const auto target = delayed_target(t); target && reach > 0.0) {
    const Vec3 d = *target - intent_;
    const double dist = norm(d);
    Vec3 move;
    if (model_.orbit_radius > 0.0) {
      const Vec3 radial = dist > 1e-12 ? d * (1.0 / dist) : Vec3{1.0, 0.0, 0.0};
      const Vec3 tangent{-radial.y, radial.x, 0.0};
      const double pull = (dist - model_.orbit_radius) / model_.orbit_radius;
      move = unit_or_zero(tangent + radial * pull) * reach;
    } else {
      move = dist > reach ? d * (reach / dist) : d;
    }
    intent_ = model_.envelope.clamp(intent_ + move);
  }

  Vec3 p = intent_;
  if (model_.tremor_amplitude > 0.0) {
    p.x += model_.tremor_amplitude *
           std::sin(2.0 * std::numbers::pi * model_.tremor_frequency * t);
  }
  if (model_.tremor_noise > 0.0) {
    p.x += model_.tremor_noise * rng_.normal();
    p.y += model_.tremor_noise * rng_.normal();
  }
  emitted_ = model_.envelope.clamp(p);

  const CameraPoint c = to_camera(calibration_, emitted_);
  return RawSample{t, std::clamp(c.u, 0.0, 1.0), std::clamp(c.v, 0.0, 1.0), true};
}

SimulationResult run_simulation(const GameConfig& cfg, const PatientModel& patient,
                                const SimulationOptions& opts) {
  using namespace protocol;
  cfg.validate();
  if (!(opts.duration >= 0.0) || !std::isfinite(opts.duration)) {
    throw ConfigError("duration: must be a finite number >= 0");
  }

  SimulationResult result;
  result.seed = opts.seed.value_or(cfg.behavior.rng_seed);

  SessionOptions so;
  so.session_id = opts.session_id;
  so.patient = patient.name;
  so.seed = result.seed;
  so.record_path = opts.out;
  Session session(cfg, so);

  PatientSim sim(patient, result.seed);
  sim.set_calibration(cfg.calibration);

  auto link = std::make_shared<LoopbackConnection>();
  const auto id = session.attach(link);

  auto pump = [&] {
    for (const auto& payload : link->receive()) {
      const ServerMessage m = decode_server(payload);
      if (const auto* w = std::get_if<Welcome>(&m)) {
        sim.set_calibration(w->config.calibration);
      } else if (const auto* u = std::get_if<StateUpdate>(&m)) {
        sim.observe(*u);
        ++result.state_updates;
      } else if (const auto* e = std::get_if<EventNotice>(&m)) {
        result.events.push_back(e->event);
      } else if (const auto* err = std::get_if<ErrorNotice>(&m)) {
        throw Error("server rejected simulator: " + err->message);
      }
    }
  };

  session.receive(id, encode(Hello{ClientKind::Simulator, std::string(kVersion)}));
  session.receive(id, encode(Control{ControlAction::Start}));
  pump();

  const auto n = static_cast<std::uint64_t>(std::llround(opts.duration * cfg.tick_rate));
  for (std::uint64_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt();
    session.receive(id, encode(InputSample{sim.step(t)}));
    session.advance();
    if (opts.on_tick) opts.on_tick(session.snapshot());
    pump();
  }
  session.receive(id, encode(Control{ControlAction::End}));
  pump();

  result.final_state = session.snapshot();
  result.ticks = result.final_state.tick;
  session.detach(id);
  return result;
}

}  // namespace mrr
