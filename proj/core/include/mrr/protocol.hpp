#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mrr/difficulty_agent.hpp"
#include "mrr/game_core.hpp"
#include "mrr/input_capture.hpp"

namespace mrr::protocol {

inline constexpr std::string_view kVersion = "mrr/1";
inline constexpr int kMajorVersion = 1;
// Upper bound on a single framed message.
inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

enum class ClientKind { Patient, Therapist, Simulator };
enum class ControlAction { Start, Pause, Resume, End };
enum class ErrorCode {
  MalformedMessage,
  UnsupportedVersion,
  UnauthorizedMessageKind,
  SlowConsumer,
  SessionClosed,
  InvalidRequest,
};

std::string_view to_string(ClientKind k);
std::string_view to_string(ControlAction a);
std::string_view to_string(ErrorCode c);

// ---- client -> server -----------------------------------------------------

struct Hello {
  ClientKind client_kind = ClientKind::Patient;
  std::string protocol_version{kVersion};
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct InputSample {
  RawSample sample;
  friend bool operator==(const InputSample&, const InputSample&) = default;
};

struct Control {
  ControlAction action = ControlAction::Start;
  friend bool operator==(const Control&, const Control&) = default;
};

struct TherapistOverride {
  DifficultyPatch patch;
  friend bool operator==(const TherapistOverride&, const TherapistOverride&) = default;
};

// Camera/table correspondences from the on-screen calibration flow; the
// server fits the map with solve_calibration.
struct Calibrate {
  std::vector<Correspondence> pairs;
  friend bool operator==(const Calibrate&, const Calibrate&) = default;
};

using ClientMessage = std::variant<Hello, InputSample, Control, TherapistOverride, Calibrate>;

// ---- server -> client -----------------------------------------------------

struct Welcome {
  std::string session_id;
  GameConfig config;
  friend bool operator==(const Welcome&, const Welcome&) = default;
};

struct StateUpdate {
  std::uint64_t tick = 0;
  double t = 0.0;
  Vec3 fish_pos;
  Vec3 fish_vel;
  Vec3 hand_pos;
  double hand_speed = 0.0;
  bool tracking_lost = false;
  AgentMode agent_mode = AgentMode::Wander;
  double progress = 0.0;
  std::uint64_t endorsed_touch_count = 0;
  std::vector<TaskStatus> tasks;
  friend bool operator==(const StateUpdate&, const StateUpdate&) = default;
};

struct EventNotice {
  GameEvent event;
  friend bool operator==(const EventNotice&, const EventNotice&) = default;
};

struct ErrorNotice {
  ErrorCode code = ErrorCode::MalformedMessage;
  std::string message;
  friend bool operator==(const ErrorNotice&, const ErrorNotice&) = default;
};

using ServerMessage = std::variant<Welcome, StateUpdate, EventNotice, ErrorNotice>;

StateUpdate make_state_update(const GameState& s);

// ---- codec ----------------------------------------------------------------

// UTF-8 JSON text with a "type" discriminator. Unknown fields are ignored on
// decode. Decoding throws MalformedMessage.
std::string encode(const ClientMessage& m);
std::string encode(const ServerMessage& m);
ClientMessage decode_client(std::string_view bytes);
ServerMessage decode_server(std::string_view bytes);

// Throws UnsupportedVersion unless `version` is "mrr/<major>[.minor]" with
// the server's major version.
void check_version(std::string_view version);

// Throws UnauthorizedMessageKind when a client of kind `k` may not send m.
void authorize(ClientKind k, const ClientMessage& m);

// ---- framing --------------------------------------------------------------

// 4-byte big-endian length prefix followed by the payload.
std::string frame(std::string_view payload);

// Incremental deframer for byte-stream transports.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  // Next complete payload, if any. Throws MalformedMessage on oversize frames.
  std::optional<std::string> next();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

// ---- broadcast ------------------------------------------------------------

// Downsamples per-tick state to `rate` Hz. Events are forwarded as
// EventNotices in log order ahead of the StateUpdate of the same tick, so no
// update with tick > k precedes an event from tick k.
class Broadcaster {
 public:
  Broadcaster(double tick_rate, double rate);

  std::vector<ServerMessage> on_tick(const GameState& state, std::span<const GameEvent> events);
  // Events emitted outside a tick (session start/end).
  std::vector<ServerMessage> on_events(std::span<const GameEvent> events);

 private:
  double tick_rate_;
  double rate_;
  std::int64_t last_slot_ = 0;
};

}  // namespace mrr::protocol
