#include "f1grasp/server.hpp"

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace f1grasp {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

class Connection;

class SessionHost : public std::enable_shared_from_this<SessionHost> {
 public:
  SessionHost(asio::io_context& io, const ServerConfig& server, long id, SessionConfig config)
      : io_(io), server_(server), id_(id), timer_(io) {
    reset(std::move(config));
  }

  long id() const { return id_; }
  void subscribe(const std::shared_ptr<Connection>& c) { subscribers_.push_back(c); }
  void post_input(const OperatorInput& in) { mailbox_ = in; }

  void reset(SessionConfig config) {
    session_.emplace(std::move(config));
    held_ = OperatorInput{};
    mailbox_.reset();
    log_.reset();
    recorder_.reset();
    if (!server_.record_dir.empty()) {
      const auto path = std::filesystem::path(server_.record_dir) /
                        ("session-" + std::to_string(id_) + "-" + std::to_string(++resets_) + ".jsonl");
      log_ = std::make_unique<std::ofstream>(path);
      recorder_ = std::make_unique<SessionRecorder>(*log_, *session_);
    }
  }

  void start();
  void stop() { timer_.cancel(); }

 private:
  void broadcast(std::string msg);
  void tick();

  asio::io_context& io_;
  const ServerConfig& server_;
  long id_;
  asio::steady_timer timer_;
  std::optional<Session> session_;
  std::optional<OperatorInput> mailbox_;
  OperatorInput held_;
  std::unique_ptr<std::ofstream> log_;
  std::unique_ptr<SessionRecorder> recorder_;
  std::vector<std::weak_ptr<Connection>> subscribers_;
  int resets_ = 0;
  unsigned generation_ = 0;
  bool result_sent_ = false;
  std::chrono::steady_clock::time_point next_;
  std::chrono::microseconds period_{0};

  friend class Connection;
};

struct ServerState {
  asio::io_context io;
  ServerConfig config;
  std::map<long, std::weak_ptr<SessionHost>> sessions;
  long next_id = 1;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, ServerState& server) : ws_(std::move(socket)), server_(server) {}

  void start() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void send(std::shared_ptr<const std::string> msg) {
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) write_next();
  }

  void close() {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
  }

 private:
  void on_request(beast::error_code ec) {
    if (ec || !websocket::is_upgrade(request_)) return;
    const std::string target(request_.target());
    if (target.rfind("/watch/", 0) == 0) {
      try {
        const long id = std::stol(target.substr(7));
        const auto it = server_.sessions.find(id);
        if (it != server_.sessions.end()) watched_ = it->second.lock();
      } catch (const std::exception&) {
      }
    } else {
      host_ = std::make_shared<SessionHost>(server_.io, server_.config, server_.next_id++, server_.config.defaults);
      server_.sessions[host_->id()] = host_;
    }
    ws_.text(true);
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec2) { self->on_accept(ec2); });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    SessionHost* h = host_ ? host_.get() : watched_.get();
    if (!h) {
      send(std::make_shared<const std::string>(json{{"type", "error"}, {"message", "no such session"}}.dump()));
      return;
    }
    h->subscribe(shared_from_this());
    send(std::make_shared<const std::string>(json{{"format", 1}, {"type", "hello"}, {"session", h->id()}}.dump()));
    if (host_) host_->start();
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      if (host_) {
        host_->stop();
        server_.sessions.erase(host_->id());
      }
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (host_) {
      try {
        const ClientMessage m = parse_client_message(text);
        if (const auto* in = std::get_if<OperatorInput>(&m)) {
          host_->post_input(*in);
        } else {
          const auto& r = std::get<ResetRequest>(m);
          SessionConfig c = server_.config.defaults;
          c.trial.object = find_object(server_.config.suite, r.object);
          c.trial.hand = make_hand_config(hand_variant_from_string(r.gripper));
          c.trial.seed = r.seed;
          host_->reset(std::move(c));
          host_->start();
        }
      } catch (const ValidationError& e) {
        send(std::make_shared<const std::string>(json{{"type", "error"}, {"message", e.what()}}.dump()));
      }
    }
    read_next();
  }

  void write_next() {
    ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->queue_.pop_front();
      if (!ec && !self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<tcp::socket> ws_;
  ServerState& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::shared_ptr<SessionHost> host_;
  std::shared_ptr<SessionHost> watched_;
};

void SessionHost::start() {
  timer_.cancel();
  ++generation_;
  result_sent_ = false;
  period_ = server_.wall_tick.count() > 0
                ? server_.wall_tick
                : std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::duration<double>(session_->config().tick));
  next_ = std::chrono::steady_clock::now();
  broadcast(serialize_state(session_->simulator(), session_->state()));
  tick();
}

void SessionHost::broadcast(std::string msg) {
  const auto shared = std::make_shared<const std::string>(std::move(msg));
  std::erase_if(subscribers_, [](const std::weak_ptr<Connection>& w) { return w.expired(); });
  for (const auto& w : subscribers_) {
    if (auto c = w.lock()) c->send(shared);
  }
}

void SessionHost::tick() {
  next_ += period_;
  timer_.expires_at(next_);
  timer_.async_wait([self = weak_from_this(), gen = generation_](beast::error_code ec) {
    auto h = self.lock();
    if (ec || !h || !h->session_ || gen != h->generation_) return;
    OperatorInput in = h->mailbox_ ? *h->mailbox_ : h->held_;
    h->mailbox_.reset();
    h->held_ = in;
    h->held_.grasp_trigger = false;
    h->session_->step(in);
    if (h->recorder_) {
      h->recorder_->record(in, *h->session_);
      h->log_->flush();
    }
    h->broadcast(serialize_state(h->session_->simulator(), h->session_->state()));
    if (h->session_->state().phase == SessionPhase::done) {
      if (!h->result_sent_) h->broadcast(result_frame(h->session_->state()).dump());
      h->result_sent_ = true;
      return;
    }
    h->tick();
  });
}

}  // namespace

struct TeleopServer::Impl {
  ServerState state;
  std::optional<tcp::acceptor> acceptor;

  void accept() {
    acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), state)->start();
      accept();
    });
  }
};

TeleopServer::TeleopServer(ServerConfig config) : impl_(std::make_unique<Impl>()) {
  config.defaults.validate();
  if (!config.record_dir.empty()) std::filesystem::create_directories(config.record_dir);
  impl_->state.config = std::move(config);
}

TeleopServer::~TeleopServer() { stop(); }

unsigned short TeleopServer::listen() {
  const ServerConfig& c = impl_->state.config;
  beast::error_code ec;
  const auto address = asio::ip::make_address(c.address, ec);
  if (ec) throw ValidationError("invalid listen address '" + c.address + "'");
  impl_->acceptor.emplace(impl_->state.io);
  const tcp::endpoint ep(address, c.port);
  impl_->acceptor->open(ep.protocol());
  impl_->acceptor->set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor->bind(ep);
  impl_->acceptor->listen();
  impl_->accept();
  return impl_->acceptor->local_endpoint().port();
}

void TeleopServer::run() {
  if (!impl_->acceptor) listen();
  std::optional<asio::signal_set> signals;
  if (impl_->state.config.handle_signals) {
    signals.emplace(impl_->state.io, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  impl_->state.io.run();
}

void TeleopServer::stop() { impl_->state.io.stop(); }

}  // namespace f1grasp
