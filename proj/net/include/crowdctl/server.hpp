#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "crowdctl/session.hpp"

namespace crowdctl {

struct ServerOptions {
  std::string address = "0.0.0.0";
  std::uint16_t port = 8080;  // 0 picks a free port
  SessionOptions session;
};

/// WebSocket game server plus a local-only `GET /admin/reliabilities` route on the same
/// port. Everything runs on one io_context thread, which therefore owns the Session.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port actually bound; valid right after construction.
  std::uint16_t port() const noexcept;

  /// Serves until stop() is called.
  void run();
  /// Safe to call from any thread.
  void stop();

  struct Impl;  // opaque; public only so connection classes in the source file can name it

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace crowdctl
