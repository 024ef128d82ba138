#include "mrr/session.hpp"

#include "mrr/errors.hpp"

namespace mrr::protocol {

Session::Session(GameConfig cfg, SessionOptions opts)
    : opts_(std::move(opts)),
      seed_(opts_.seed.value_or(cfg.behavior.rng_seed)),
      engine_(cfg, seed_),
      broadcaster_(cfg.tick_rate, cfg.broadcast_rate),
      pending_difficulty_(cfg.difficulty) {
  if (opts_.record_path) {
    SessionHeader h;
    h.session_id = opts_.session_id;
    h.patient = opts_.patient;
    h.seed = seed_;
    h.started_at = 0.0;
    h.started_utc = opts_.started_utc;
    h.config = engine_.config();
    writer_ = std::make_unique<SessionWriter>(*opts_.record_path, std::move(h));
  }
}

Session::ConnectionId Session::attach(std::shared_ptr<Connection> c) {
  std::lock_guard lock(mu_);
  const ConnectionId id = next_id_++;
  peers_.emplace(id, Peer{std::move(c), std::nullopt});
  return id;
}

void Session::detach(ConnectionId id) {
  std::lock_guard lock(mu_);
  peers_.erase(id);
}

void Session::receive(ConnectionId id, std::string_view payload) {
  std::lock_guard lock(mu_);
  auto it = peers_.find(id);
  if (it == peers_.end()) return;
  Peer& peer = it->second;
  try {
    const ClientMessage m = decode_client(payload);
    handle(id, peer, m);
  } catch (const MalformedMessage& e) {
    fail(id, peer, ErrorCode::MalformedMessage, e.what(), true);
  } catch (const UnsupportedVersion& e) {
    fail(id, peer, ErrorCode::UnsupportedVersion, e.what(), true);
  } catch (const UnauthorizedMessageKind& e) {
    fail(id, peer, ErrorCode::UnauthorizedMessageKind, e.what(), false);
  } catch (const SessionClosed& e) {
    fail(id, peer, ErrorCode::SessionClosed, e.what(), false);
  } catch (const Error& e) {
    fail(id, peer, ErrorCode::InvalidRequest, e.what(), false);
  }
  reap();
}

void Session::handle(ConnectionId id, Peer& peer, const ClientMessage& m) {
  if (const auto* hello = std::get_if<Hello>(&m)) {
    if (peer.kind) throw Error("duplicate hello");
    check_version(hello->protocol_version);
    peer.kind = hello->client_kind;
    if (!deliver(id, peer, Welcome{opts_.session_id, engine_.config()})) return;
    if (phase_ != SessionPhase::Waiting) deliver(id, peer, make_state_update(engine_.state()));
    return;
  }
  if (!peer.kind) throw UnauthorizedMessageKind("hello is required before any other message");
  authorize(*peer.kind, m);

  if (const auto* in = std::get_if<InputSample>(&m)) {
    if (phase_ != SessionPhase::Running) return;
    if (pending_samples_.size() >= opts_.max_pending_samples) {
      pending_samples_.erase(pending_samples_.begin());
    }
    pending_samples_.push_back(in->sample);
  } else if (const auto* ctl = std::get_if<Control>(&m)) {
    switch (ctl->action) {
      case ControlAction::Start:
        start_locked();
        break;
      case ControlAction::Pause:
        if (phase_ == SessionPhase::Running) phase_ = SessionPhase::Paused;
        break;
      case ControlAction::Resume:
        if (phase_ == SessionPhase::Paused) phase_ = SessionPhase::Running;
        break;
      case ControlAction::End:
        end_locked();
        break;
    }
  } else if (const auto* ov = std::get_if<TherapistOverride>(&m)) {
    if (phase_ == SessionPhase::Ended) throw SessionClosed("session has ended");
    pending_difficulty_ = ov->patch.apply(pending_difficulty_);
    pending_patches_.push_back(ov->patch);
  } else if (const auto* cal = std::get_if<Calibrate>(&m)) {
    if (phase_ == SessionPhase::Ended) throw SessionClosed("session has ended");
    pending_calibration_ = solve_calibration(cal->pairs);
  }
}

void Session::start_locked() {
  if (phase_ != SessionPhase::Waiting) return;
  phase_ = SessionPhase::Running;
  publish_events(engine_.start());
}

void Session::end_locked() {
  if (phase_ == SessionPhase::Ended) return;
  if (phase_ == SessionPhase::Waiting) publish_events(engine_.start());
  phase_ = SessionPhase::Ended;
  publish_events({engine_.finish()});
  if (writer_ && writer_->is_open()) {
    writer_->close({engine_.state().t, engine_.state().tick, engine_.digest()});
  }
}

bool Session::advance() {
  std::lock_guard lock(mu_);
  if (phase_ != SessionPhase::Running) return false;
  const std::uint64_t k = engine_.state().tick + 1;
  std::vector<RawSample> samples;
  samples.swap(pending_samples_);
  std::vector<DifficultyPatch> patches;
  patches.swap(pending_patches_);
  std::optional<CalibrationMap> calibration;
  calibration.swap(pending_calibration_);

  if (writer_) {
    for (const auto& p : patches) writer_->append(OverrideRecord{k, p});
    if (calibration) writer_->append(CalibrationRecord{k, *calibration});
    for (const auto& s : samples) writer_->append(InputRecord{k, s});
  }
  SessionEngine::StepOutput out = engine_.advance(samples, patches, calibration);
  if (writer_) {
    for (const auto& e : out.events) writer_->append(e);
    if (out.trace) writer_->append(*out.trace);
  }
  log_.insert(log_.end(), out.events.begin(), out.events.end());
  publish(broadcaster_.on_tick(engine_.state(), out.events));
  reap();
  return true;
}

void Session::end() {
  std::lock_guard lock(mu_);
  end_locked();
  reap();
}

void Session::publish_events(const std::vector<GameEvent>& evs) {
  if (writer_) {
    for (const auto& e : evs) writer_->append(e);
  }
  log_.insert(log_.end(), evs.begin(), evs.end());
  publish(broadcaster_.on_events(evs));
}

void Session::publish(const std::vector<ServerMessage>& msgs) {
  for (auto& [id, peer] : peers_) {
    if (!peer.kind) continue;
    for (const auto& m : msgs) {
      if (!deliver(id, peer, m)) break;
    }
  }
}

bool Session::deliver(ConnectionId id, Peer& peer, const ServerMessage& m) {
  if (!peer.conn) return false;
  if (peer.conn->send(encode(m))) return true;
  // Slow consumer: best-effort notice, then drop the connection.
  peer.conn->send(encode(ErrorNotice{ErrorCode::SlowConsumer, "outbound buffer overflow"}));
  peer.conn->close();
  peer.conn.reset();
  doomed_.push_back(id);
  return false;
}

void Session::fail(ConnectionId id, Peer& peer, ErrorCode code, std::string message, bool close) {
  if (!deliver(id, peer, ErrorNotice{code, std::move(message)})) return;
  if (close) {
    peer.conn->close();
    peer.conn.reset();
    doomed_.push_back(id);
  }
}

void Session::reap() {
  for (auto id : doomed_) peers_.erase(id);
  doomed_.clear();
}

SessionPhase Session::phase() const {
  std::lock_guard lock(mu_);
  return phase_;
}

GameState Session::snapshot() const {
  std::lock_guard lock(mu_);
  return engine_.state();
}

GameConfig Session::config() const {
  std::lock_guard lock(mu_);
  return engine_.config();
}

std::vector<GameEvent> Session::event_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t Session::connection_count() const {
  std::lock_guard lock(mu_);
  return peers_.size();
}

bool LoopbackConnection::send(std::string payload) {
  std::lock_guard lock(mu_);
  if (closed_) return false;
  if (decoder_.buffered() + payload.size() + 4 > capacity_) return false;
  decoder_.feed(frame(payload));
  return true;
}

void LoopbackConnection::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
}

std::vector<std::string> LoopbackConnection::receive() {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  while (auto p = decoder_.next()) out.push_back(std::move(*p));
  return out;
}

bool LoopbackConnection::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace mrr::protocol
