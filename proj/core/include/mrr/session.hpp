#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrr/game_core.hpp"
#include "mrr/protocol.hpp"
#include "mrr/session_engine.hpp"
#include "mrr/session_store.hpp"

namespace mrr::protocol {

// Outbound side of one client channel. Implementations must not block.
class Connection {
 public:
  virtual ~Connection() = default;
  // Queues one message payload; returns false when the outbound buffer is full.
  virtual bool send(std::string payload) = 0;
  virtual void close() = 0;
};

struct SessionOptions {
  std::string session_id = "session";
  std::string patient = "anonymous";
  std::optional<std::uint64_t> seed;  // defaults to behavior.rng_seed
  std::optional<std::filesystem::path> record_path;
  std::optional<std::string> started_utc;
  std::size_t max_pending_samples = 1024;
};

enum class SessionPhase { Waiting, Running, Paused, Ended };

// One authoritative game session. Clients talk to it through `receive`; the
// owner drives time with `advance`. All methods are thread-safe. A bad
// message only affects the connection that sent it.
class Session {
 public:
  using ConnectionId = std::uint64_t;

  Session(GameConfig cfg, SessionOptions opts);

  ConnectionId attach(std::shared_ptr<Connection> c);
  void detach(ConnectionId id);
  void receive(ConnectionId id, std::string_view payload);

  // Runs one tick when the session is running. Returns true if it did.
  bool advance();
  // Ends the session, writes the footer and notifies clients. Idempotent.
  void end();

  SessionPhase phase() const;
  GameState snapshot() const;
  GameConfig config() const;
  std::vector<GameEvent> event_log() const;
  std::size_t connection_count() const;
  const std::string& id() const { return opts_.session_id; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct Peer {
    std::shared_ptr<Connection> conn;
    std::optional<ClientKind> kind;
  };

  void handle(ConnectionId id, Peer& peer, const ClientMessage& m);
  void start_locked();
  void end_locked();
  void publish(const std::vector<ServerMessage>& msgs);
  void publish_events(const std::vector<GameEvent>& evs);
  // Sends to one peer; on overflow the peer is closed and marked for removal.
  bool deliver(ConnectionId id, Peer& peer, const ServerMessage& m);
  void fail(ConnectionId id, Peer& peer, ErrorCode code, std::string message, bool close);
  void reap();

  SessionOptions opts_;
  std::uint64_t seed_;
  mutable std::mutex mu_;
  SessionEngine engine_;
  Broadcaster broadcaster_;
  std::unique_ptr<SessionWriter> writer_;
  SessionPhase phase_ = SessionPhase::Waiting;
  std::vector<GameEvent> log_;

  std::map<ConnectionId, Peer> peers_;
  std::vector<ConnectionId> doomed_;
  ConnectionId next_id_ = 1;

  std::vector<RawSample> pending_samples_;
  std::vector<DifficultyPatch> pending_patches_;
  std::optional<CalibrationMap> pending_calibration_;
  DifficultyConfig pending_difficulty_;
};

// In-process transport. Payloads are framed into a byte stream exactly as a
// socket transport would carry them; the peer drains and deframes.
class LoopbackConnection : public Connection {
 public:
  explicit LoopbackConnection(std::size_t capacity_bytes = 64u << 20)
      : capacity_(capacity_bytes) {}

  bool send(std::string payload) override;
  void close() override;

  // Decoded payloads received since the last call.
  std::vector<std::string> receive();
  bool closed() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  FrameDecoder decoder_;
  bool closed_ = false;
};

}  // namespace mrr::protocol
