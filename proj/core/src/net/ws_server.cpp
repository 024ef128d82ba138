#include "mrr/net/ws_server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace mrr::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

class Peer : public protocol::Connection, public std::enable_shared_from_this<Peer> {
 public:
  Peer(tcp::socket socket, std::size_t max_bytes)
      : ws_(std::move(socket)), max_bytes_(max_bytes) {}

  void start(http::request<http::string_body> req,
             std::shared_ptr<protocol::Session> session) {
    session_ = std::move(session);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(http::field::server, "mrr");
    }));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->session_->attach(self);
      self->attached_ = true;
      self->read();
    });
  }

  bool send(std::string payload) override {
    std::lock_guard lock(mu_);
    if (closing_ || bytes_ + payload.size() > max_bytes_) return false;
    bytes_ += payload.size();
    queue_.push_back(std::move(payload));
    if (!writing_) {
      writing_ = true;
      asio::post(ws_.get_executor(), [self = shared_from_this()] { self->write(); });
    }
    return true;
  }

  void close() override {
    std::lock_guard lock(mu_);
    if (closing_) return;
    closing_ = true;
    if (!writing_) {
      asio::post(ws_.get_executor(), [self = shared_from_this()] { self->shutdown(); });
    }
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->detach();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->session_->receive(self->id_, text);
      self->read();
    });
  }

  void write() {
    std::unique_lock lock(mu_);
    if (queue_.empty()) {
      writing_ = false;
      if (closing_) {
        lock.unlock();
        shutdown();
      }
      return;
    }
    const std::string& front = queue_.front();
    lock.unlock();
    ws_.text(true);
    ws_.async_write(asio::buffer(front), [self = shared_from_this()](beast::error_code ec,
                                                                     std::size_t) {
      {
        std::lock_guard lock(self->mu_);
        self->bytes_ -= self->queue_.front().size();
        self->queue_.pop_front();
        if (ec) {
          self->closing_ = true;
          self->queue_.clear();
          self->bytes_ = 0;
          self->writing_ = false;
        }
      }
      if (ec) {
        self->detach();
        return;
      }
      self->write();
    });
  }

  void shutdown() {
    ws_.async_close(websocket::close_code::normal,
                    [self = shared_from_this()](beast::error_code) { self->detach(); });
  }

  void detach() {
    if (attached_.exchange(false)) session_->detach(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<protocol::Session> session_;
  protocol::Session::ConnectionId id_ = 0;
  std::atomic<bool> attached_{false};

  std::mutex mu_;
  std::deque<std::string> queue_;
  std::size_t bytes_ = 0;
  std::size_t max_bytes_;
  bool writing_ = false;
  bool closing_ = false;
};

}  // namespace

struct Server::Impl {
  struct Hosted {
    std::shared_ptr<protocol::Session> session;
    std::jthread ticker;
  };

  explicit Impl(ServerOptions o) : opts(std::move(o)), acceptor(ioc), signals(ioc) {}

  std::shared_ptr<protocol::Session> open_session(const std::string& id) {
    std::lock_guard lock(mu);
    auto it = sessions.find(id);
    if (it != sessions.end() && it->second.session->phase() != protocol::SessionPhase::Ended) {
      return it->second.session;
    }
    if (it != sessions.end()) sessions.erase(it);

    std::filesystem::path path = opts.data_dir / (id + ".jsonl");
    for (int n = 1; std::filesystem::exists(path); ++n) {
      path = opts.data_dir / (id + "." + std::to_string(n) + ".jsonl");
    }
    protocol::SessionOptions so;
    so.session_id = id;
    so.record_path = path;
    if (opts.utc_now) {
      if (std::string utc = opts.utc_now(); !utc.empty()) so.started_utc = utc;
    }
    auto session = std::make_shared<protocol::Session>(opts.config, so);
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(opts.config.dt()));
    std::jthread ticker([session, period](std::stop_token st) {
      auto next = std::chrono::steady_clock::now();
      while (!st.stop_requested() && session->phase() != protocol::SessionPhase::Ended) {
        session->advance();
        next += period;
        const auto now = std::chrono::steady_clock::now();
        if (now - next > std::chrono::seconds(1)) next = now;  // fell far behind; resync
        std::this_thread::sleep_until(next);
      }
    });
    sessions.emplace(id, Hosted{session, std::move(ticker)});
    return session;
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;  // acceptor closed
      handshake(std::move(s));
      accept();
    });
  }

  void handshake(tcp::socket socket) {
    struct Pending {
      beast::tcp_stream stream;
      beast::flat_buffer buffer;
      http::request<http::string_body> req;
    };
    auto p = std::make_shared<Pending>(Pending{beast::tcp_stream(std::move(socket)), {}, {}});
    p->stream.expires_after(std::chrono::seconds(10));
    http::async_read(p->stream, p->buffer, p->req, [this, p](beast::error_code ec, std::size_t) {
      if (ec) return;
      const std::string target(p->req.target());
      const std::string prefix = "/session/";
      std::string id;
      if (target.rfind(prefix, 0) == 0) id = target.substr(prefix.size());
      if (const auto q = id.find('?'); q != std::string::npos) id.resize(q);

      auto reject = [&](http::status status, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, p->req.version());
        res->set(http::field::server, "mrr");
        res->set(http::field::content_type, "text/plain");
        res->body() = std::move(body);
        res->prepare_payload();
        http::async_write(p->stream, *res, [p, res](beast::error_code, std::size_t) {
          beast::error_code ignored;
          p->stream.socket().shutdown(tcp::socket::shutdown_both, ignored);
        });
      };
      if (!valid_session_id(id)) return reject(http::status::not_found, "expected /session/{id}\n");
      if (!websocket::is_upgrade(p->req)) {
        return reject(http::status::upgrade_required, "WebSocket upgrade required\n");
      }
      if (stopping) return reject(http::status::service_unavailable, "shutting down\n");

      std::shared_ptr<protocol::Session> session;
      try {
        session = open_session(id);
      } catch (const std::exception& e) {
        return reject(http::status::internal_server_error, std::string(e.what()) + "\n");
      }
      p->stream.expires_never();
      auto peer = std::make_shared<Peer>(p->stream.release_socket(), opts.max_outbound_bytes);
      {
        std::lock_guard lock(mu);
        peers.push_back(peer);
      }
      peer->start(std::move(p->req), std::move(session));
    });
  }

  void shutdown() {
    if (stopping.exchange(true)) return;
    beast::error_code ignored;
    acceptor.close(ignored);
    signals.cancel(ignored);
    std::map<std::string, Hosted> closing;
    std::vector<std::weak_ptr<Peer>> open_peers;
    {
      std::lock_guard lock(mu);
      closing.swap(sessions);
      open_peers.swap(peers);
    }
    for (auto& [id, h] : closing) {
      h.ticker.request_stop();
      if (h.ticker.joinable()) h.ticker.join();
      h.session->end();
    }
    for (auto& w : open_peers) {
      if (auto p = w.lock()) p->close();
    }
    // Let close frames go out, then stop.
    auto timer = std::make_shared<asio::steady_timer>(ioc, std::chrono::milliseconds(200));
    timer->async_wait([this, timer](beast::error_code) { ioc.stop(); });
  }

  ServerOptions opts;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::signal_set signals;
  std::atomic<bool> stopping{false};

  mutable std::mutex mu;
  std::map<std::string, Hosted> sessions;
  std::vector<std::weak_ptr<Peer>> peers;
};

Server::Server(ServerOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {
  auto& o = impl_->opts;
  o.config.validate();
  std::error_code fs_ec;
  std::filesystem::create_directories(o.data_dir, fs_ec);
  if (fs_ec) throw StorageFailure("cannot create data directory " + o.data_dir.string() + ": " + fs_ec.message());

  const std::string where = o.host + ":" + std::to_string(o.port);
  beast::error_code ec;
  const auto address = asio::ip::make_address(o.host, ec);
  if (ec) throw BindError("cannot bind " + where + ": invalid address (" + ec.message() + ")");
  const tcp::endpoint ep(address, o.port);
  auto& a = impl_->acceptor;
  a.open(ep.protocol(), ec);
  if (!ec) a.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(ep, ec);
  if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw BindError("cannot bind " + where + ": " + ec.message());
}

Server::~Server() {
  if (impl_ && !impl_->stopping) {
    impl_->shutdown();
  }
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

std::string Server::endpoint() const {
  return impl_->opts.host + ":" + std::to_string(port());
}

void Server::run() {
  auto& im = *impl_;
  if (im.opts.handle_signals) {
    im.signals.add(SIGINT);
    im.signals.add(SIGTERM);
    im.signals.async_wait([&im](beast::error_code ec, int) {
      if (!ec) im.shutdown();
    });
  }
  im.accept();
  im.ioc.run();
  im.shutdown();
}

void Server::stop() {
  asio::post(impl_->ioc, [im = impl_.get()] { im->shutdown(); });
}

std::vector<std::string> Server::session_ids() const {
  std::lock_guard lock(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [id, h] : impl_->sessions) out.push_back(id);
  return out;
}

std::shared_ptr<protocol::Session> Server::session(const std::string& id) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->sessions.find(id);
  return it == impl_->sessions.end() ? nullptr : it->second.session;
}

}  // namespace mrr::net
