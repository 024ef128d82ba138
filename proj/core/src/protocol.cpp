#include "mrr/protocol.hpp"

#include <charconv>
#include <cmath>

#include "mrr/errors.hpp"
#include "mrr/json_codec.hpp"

namespace mrr::protocol {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ClientKind client_kind_from_string(const JsonReader& r) {
  const std::string s = r.string();
  if (s == "patient") return ClientKind::Patient;
  if (s == "therapist") return ClientKind::Therapist;
  if (s == "simulator") return ClientKind::Simulator;
  r.fail("unknown client kind '" + s + "'");
}

ControlAction control_from_string(const JsonReader& r) {
  const std::string s = r.string();
  if (s == "start") return ControlAction::Start;
  if (s == "pause") return ControlAction::Pause;
  if (s == "resume") return ControlAction::Resume;
  if (s == "end") return ControlAction::End;
  r.fail("unknown control action '" + s + "'");
}

ErrorCode error_code_from_string(const JsonReader& r) {
  const std::string s = r.string();
  for (auto c : {ErrorCode::MalformedMessage, ErrorCode::UnsupportedVersion,
                 ErrorCode::UnauthorizedMessageKind, ErrorCode::SlowConsumer,
                 ErrorCode::SessionClosed, ErrorCode::InvalidRequest}) {
    if (s == to_string(c)) return c;
  }
  r.fail("unknown error code '" + s + "'");
}

Json parse_payload(std::string_view bytes) {
  Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw MalformedMessage("message is not valid JSON");
  if (!j.is_object()) throw MalformedMessage("message must be a JSON object");
  return j;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const DecodeError& e) {
    throw MalformedMessage(e.what());
  }
}

}  // namespace

std::string_view to_string(ClientKind k) {
  switch (k) {
    case ClientKind::Patient: return "patient";
    case ClientKind::Therapist: return "therapist";
    case ClientKind::Simulator: return "simulator";
  }
  return "patient";
}

std::string_view to_string(ControlAction a) {
  switch (a) {
    case ControlAction::Start: return "start";
    case ControlAction::Pause: return "pause";
    case ControlAction::Resume: return "resume";
    case ControlAction::End: return "end";
  }
  return "start";
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::MalformedMessage: return "malformed_message";
    case ErrorCode::UnsupportedVersion: return "unsupported_version";
    case ErrorCode::UnauthorizedMessageKind: return "unauthorized_message_kind";
    case ErrorCode::SlowConsumer: return "slow_consumer";
    case ErrorCode::SessionClosed: return "session_closed";
    case ErrorCode::InvalidRequest: return "invalid_request";
  }
  return "malformed_message";
}

StateUpdate make_state_update(const GameState& s) {
  StateUpdate u;
  u.tick = s.tick;
  u.t = s.t;
  u.fish_pos = s.fish.pos;
  u.fish_vel = s.fish.vel;
  u.hand_pos = s.hand.pos;
  u.hand_speed = s.hand.speed;
  u.tracking_lost = s.tracking_lost;
  u.agent_mode = s.agent.mode;
  u.progress = s.progress.fraction;
  u.endorsed_touch_count = s.endorsed_touch_count;
  u.tasks.reserve(s.tasks.size());
  for (const auto& t : s.tasks) u.tasks.push_back(t.status);
  return u;
}

std::string encode(const ClientMessage& m) {
  Json j = std::visit(
      Overloaded{
          [](const Hello& h) -> Json {
            return {{"type", "hello"},
                    {"client_kind", to_string(h.client_kind)},
                    {"protocol_version", h.protocol_version}};
          },
          [](const InputSample& s) -> Json {
            return {{"type", "input_sample"}, {"sample", to_json(s.sample)}};
          },
          [](const Control& c) -> Json {
            return {{"type", "control"}, {"action", to_string(c.action)}};
          },
          [](const TherapistOverride& o) -> Json {
            return {{"type", "therapist_override"}, {"patch", to_json(o.patch)}};
          },
          [](const Calibrate& c) -> Json {
            Json pairs = Json::array();
            for (const auto& p : c.pairs) {
              pairs.push_back({{"camera", {p.camera.u, p.camera.v}}, {"game", {p.game.x, p.game.y}}});
            }
            return {{"type", "calibrate"}, {"pairs", pairs}};
          },
      },
      m);
  return j.dump();
}

std::string encode(const ServerMessage& m) {
  Json j = std::visit(
      Overloaded{
          [](const Welcome& w) -> Json {
            return {{"type", "welcome"},
                    {"protocol_version", kVersion},
                    {"session_id", w.session_id},
                    {"config", to_json(w.config)}};
          },
          [](const StateUpdate& u) -> Json {
            Json tasks = Json::array();
            for (auto s : u.tasks) tasks.push_back(to_string(s));
            return {{"type", "state_update"},
                    {"tick", u.tick},
                    {"t", u.t},
                    {"fish", {{"pos", to_json(u.fish_pos)}, {"vel", to_json(u.fish_vel)}}},
                    {"hand", {{"pos", to_json(u.hand_pos)}, {"speed", u.hand_speed},
                              {"tracking_lost", u.tracking_lost}}},
                    {"agent_mode", to_string(u.agent_mode)},
                    {"progress", u.progress},
                    {"endorsed_touch_count", u.endorsed_touch_count},
                    {"tasks", tasks}};
          },
          [](const EventNotice& e) -> Json {
            return {{"type", "event"}, {"event", to_json(e.event)}};
          },
          [](const ErrorNotice& e) -> Json {
            return {{"type", "error"}, {"code", to_string(e.code)}, {"message", e.message}};
          },
      },
      m);
  return j.dump();
}

ClientMessage decode_client(std::string_view bytes) {
  const Json j = parse_payload(bytes);
  return guarded([&]() -> ClientMessage {
    const JsonReader r(j, "", false);
    const std::string type = r.string("type");
    if (type == "hello") {
      return Hello{client_kind_from_string(r.at("client_kind")), r.string("protocol_version")};
    }
    if (type == "input_sample") return InputSample{read_raw_sample(r.at("sample"))};
    if (type == "control") return Control{control_from_string(r.at("action"))};
    if (type == "therapist_override") return TherapistOverride{read_difficulty_patch(r.at("patch"))};
    if (type == "calibrate") {
      Calibrate c;
      const JsonReader pairs = r.at("pairs");
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const JsonReader p = pairs.at(i);
        const JsonReader cam = p.at("camera");
        const JsonReader game = p.at("game");
        if (cam.size() != 2 || game.size() != 2) p.fail("expected 2D points");
        c.pairs.push_back({{cam.at(std::size_t{0}).number(), cam.at(std::size_t{1}).number()},
                           {game.at(std::size_t{0}).number(), game.at(std::size_t{1}).number()}});
      }
      return c;
    }
    r.at("type").fail("unknown message type '" + type + "'");
  });
}

ServerMessage decode_server(std::string_view bytes) {
  const Json j = parse_payload(bytes);
  return guarded([&]() -> ServerMessage {
    const JsonReader r(j, "", false);
    const std::string type = r.string("type");
    if (type == "welcome") {
      return Welcome{r.string("session_id"), read_game_config(r.at("config"))};
    }
    if (type == "state_update") {
      StateUpdate u;
      u.tick = r.uint("tick");
      u.t = r.number("t");
      const JsonReader fish = r.at("fish");
      u.fish_pos = read_vec3(fish.at("pos"));
      u.fish_vel = read_vec3(fish.at("vel"));
      const JsonReader hand = r.at("hand");
      u.hand_pos = read_vec3(hand.at("pos"));
      hand.read("speed", u.hand_speed);
      hand.read("tracking_lost", u.tracking_lost);
      u.agent_mode = agent_mode_from_string(r.string("agent_mode"));
      u.progress = r.number("progress");
      r.read("endorsed_touch_count", u.endorsed_touch_count);
      const JsonReader tasks = r.at("tasks");
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        u.tasks.push_back(task_status_from_string(tasks.at(i).string()));
      }
      return u;
    }
    if (type == "event") return EventNotice{read_game_event(r.at("event"))};
    if (type == "error") return ErrorNotice{error_code_from_string(r.at("code")), r.string("message")};
    r.at("type").fail("unknown message type '" + type + "'");
  });
}

void check_version(std::string_view version) {
  constexpr std::string_view prefix = "mrr/";
  if (version.substr(0, prefix.size()) != prefix) {
    throw UnsupportedVersion("unsupported protocol '" + std::string(version) + "'");
  }
  const std::string_view rest = version.substr(prefix.size());
  int major = -1;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), major);
  const bool tail_ok = ptr == rest.data() + rest.size() || *ptr == '.';
  if (ec != std::errc{} || !tail_ok || major != kMajorVersion) {
    throw UnsupportedVersion("unsupported protocol version '" + std::string(version) +
                             "', server speaks " + std::string(kVersion));
  }
}

void authorize(ClientKind k, const ClientMessage& m) {
  if (std::holds_alternative<InputSample>(m) && k == ClientKind::Therapist) {
    throw UnauthorizedMessageKind("input samples are accepted only from patient or simulator clients");
  }
  if (std::holds_alternative<TherapistOverride>(m) && k != ClientKind::Therapist) {
    throw UnauthorizedMessageKind("difficulty overrides are accepted only from therapist clients");
  }
}

std::string frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw MalformedMessage("message exceeds frame limit");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

void FrameDecoder::feed(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<std::string> FrameDecoder::next() {
  if (buffered() < 4) return std::nullopt;
  const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + offset_);
  const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
                          (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
  if (n > kMaxFrameBytes) throw MalformedMessage("frame length exceeds limit");
  if (buffered() < 4 + std::size_t{n}) return std::nullopt;
  std::string payload = buffer_.substr(offset_ + 4, n);
  offset_ += 4 + n;
  if (offset_ > 65536 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return payload;
}

Broadcaster::Broadcaster(double tick_rate, double rate) : tick_rate_(tick_rate), rate_(rate) {
  if (!(tick_rate > 0.0) || !(rate > 0.0) || rate > tick_rate) {
    throw ConfigError("broadcast rate must be in (0, tick_rate]");
  }
}

std::vector<ServerMessage> Broadcaster::on_tick(const GameState& state,
                                                std::span<const GameEvent> events) {
  std::vector<ServerMessage> out = on_events(events);
  const auto slot = static_cast<std::int64_t>(
      std::floor(static_cast<double>(state.tick) * rate_ / tick_rate_ + 1e-9));
  if (slot > last_slot_) {
    last_slot_ = slot;
    out.emplace_back(make_state_update(state));
  }
  return out;
}

std::vector<ServerMessage> Broadcaster::on_events(std::span<const GameEvent> events) {
  std::vector<ServerMessage> out;
  out.reserve(events.size());
  for (const auto& e : events) out.emplace_back(EventNotice{e});
  return out;
}

}  // namespace mrr::protocol
