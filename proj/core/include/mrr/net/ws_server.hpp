#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mrr/errors.hpp"
#include "mrr/game_core.hpp"
#include "mrr/session.hpp"

namespace mrr::net {

struct BindError : Error {
  using Error::Error;
};

struct ServerOptions {
  GameConfig config;
  std::filesystem::path data_dir = ".";
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::size_t max_outbound_bytes = 4u << 20;
  bool handle_signals = false;  // SIGINT/SIGTERM call stop()
  // UTC timestamp recorded in session headers; empty leaves it out.
  std::function<std::string()> utc_now;
};

// WebSocket front end: clients connect to ws://host:port/session/{id} and
// exchange protocol messages, one per text frame. Each session id maps to
// one live Session with its own tick thread and session file.
class Server {
 public:
  // Binds and listens. Throws BindError.
  explicit Server(ServerOptions opts);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  std::string endpoint() const;  // "host:port"

  // Serves until stop(). Open sessions are ended and their files closed
  // before this returns.
  void run();
  // Thread-safe.
  void stop();

  std::vector<std::string> session_ids() const;
  std::shared_ptr<protocol::Session> session(const std::string& id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Session ids are 1-64 characters of [A-Za-z0-9_-].
bool valid_session_id(std::string_view id);

}  // namespace mrr::net
