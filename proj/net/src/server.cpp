#include "crowdctl/server.hpp"

#include <chrono>
#include <deque>
#include <map>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "crowdctl/clock.hpp"

namespace crowdctl {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class WsConn;

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions o)
      : options(std::move(o)), acceptor(ioc), timer(ioc), session(options.session) {
    const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void start();
  void accept();
  void schedule_tick();
  void on_tick();
  void deliver(const std::vector<Session::Outgoing>& out);
  void on_ws_open(const std::shared_ptr<WsConn>& conn);
  void on_ws_message(Session::ConnId id, const std::string& text);
  void on_ws_close(Session::ConnId id);
  std::string admin_body() const { return session.admin_reliabilities_json(); }

  ServerOptions options;
  asio::io_context ioc{1};
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  Session session;
  SteadyClock clock;
  std::map<Session::ConnId, std::shared_ptr<WsConn>> conns;
  Session::ConnId next_id = 1;
  std::chrono::steady_clock::time_point loop_origin;
  std::int64_t loop_ticks = 0;
};

namespace {

class WsConn : public std::enable_shared_from_this<WsConn> {
 public:
  WsConn(Server::Impl* owner, Session::ConnId id, beast::tcp_stream stream)
      : owner_(owner), id_(id), ws_(std::move(stream)) {}

  Session::ConnId id() const { return id_; }

  void accept(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->open_ = true;
      self->owner_->on_ws_open(self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> text) {
    if (!open_) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write_next();
  }

  void close() {
    if (!open_) return;
    open_ = false;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->open_ = false;
        self->owner_->on_ws_close(self->id_);
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->owner_->on_ws_message(self->id_, text);
      self->read();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty() && self->open_) self->write_next();
    });
  }

  Server::Impl* owner_;
  Session::ConnId id_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool open_ = false;
};

// Reads one HTTP request: WebSocket upgrades are handed to WsConn, everything else is
// answered here.
class HttpConn : public std::enable_shared_from_this<HttpConn> {
 public:
  HttpConn(Server::Impl* owner, tcp::socket socket) : owner_(owner), stream_(std::move(socket)) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(10));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (!ec) self->dispatch();
    });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto conn = std::make_shared<WsConn>(owner_, owner_->next_id++, std::move(stream_));
      conn->accept(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    res->set(http::field::server, "crowdctl");

    beast::error_code ec;
    const auto remote = stream_.socket().remote_endpoint(ec);
    const bool local = !ec && remote.address().is_loopback();
    const auto target = req_.target();
    if (target != "/admin/reliabilities") {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    } else if (!local) {
      res->result(http::status::forbidden);
      res->set(http::field::content_type, "text/plain");
      res->body() = "admin endpoint is local-only\n";
    } else if (req_.method() != http::verb::get) {
      res->result(http::status::method_not_allowed);
      res->set(http::field::content_type, "text/plain");
      res->body() = "GET only\n";
    } else {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = owner_->admin_body();
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  Server::Impl* owner_;
  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::start() {
  accept();
  loop_origin = std::chrono::steady_clock::now();
  loop_ticks = 0;
  schedule_tick();
}

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpConn>(this, std::move(socket))->start();
    accept();
  });
}

void Server::Impl::schedule_tick() {
  using namespace std::chrono;
  const auto period = duration_cast<steady_clock::duration>(duration<double>(1.0 / EngineConstants::kTickRate));
  ++loop_ticks;
  auto due = loop_origin + period * loop_ticks;
  const auto now = steady_clock::now();
  if (now - due > milliseconds(250)) {
    // Too far behind (suspended process): resynchronize instead of bursting.
    loop_origin = now;
    loop_ticks = 0;
    due = now;
  }
  timer.expires_at(due);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    on_tick();
    schedule_tick();
  });
}

void Server::Impl::on_tick() { deliver(session.on_tick(clock.now())); }

void Server::Impl::deliver(const std::vector<Session::Outgoing>& out) {
  for (const auto& msg : out) {
    auto text = std::make_shared<const std::string>(msg.text);
    if (msg.to) {
      if (auto it = conns.find(*msg.to); it != conns.end()) it->second->send(text);
    } else {
      for (auto& [id, conn] : conns) conn->send(text);
    }
  }
}

void Server::Impl::on_ws_open(const std::shared_ptr<WsConn>& conn) {
  conns[conn->id()] = conn;
  session.on_open(conn->id());
}

void Server::Impl::on_ws_message(Session::ConnId id, const std::string& text) {
  deliver(session.on_message(id, text, clock.now()));
}

void Server::Impl::on_ws_close(Session::ConnId id) {
  conns.erase(id);
  deliver(session.on_close(id, clock.now()));
}

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

std::uint16_t Server::port() const noexcept { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->start();
  impl_->ioc.run();
  for (auto& [id, conn] : impl_->conns) conn->close();
  impl_->conns.clear();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace crowdctl
