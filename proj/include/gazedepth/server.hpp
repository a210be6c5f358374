#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gazedepth/scene.hpp"
#include "gazedepth/session.hpp"

namespace gazedepth {

struct ServerOptions {
  SessionOptions session;
  // Lines read from a client but not yet processed. Exceeding it closes the session.
  std::size_t queue_bound{4096};
};

// Line-delimited JSON session service over TCP. Each connection gets its own
// Session; only the immutable Scene is shared.
class SessionServer {
 public:
  SessionServer(const Scene& scene, ServerOptions options = {});
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Binds and starts accepting. Port 0 picks a free port. Returns the bound
  // port; throws std::runtime_error when the address cannot be bound.
  std::uint16_t start(const std::string& host, std::uint16_t port);
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

  std::uint16_t port() const { return port_; }

 private:
  struct Connection;

  void accept_loop();
  void run_connection(std::shared_ptr<Connection> conn);

  const Scene* scene_;
  ServerOptions options_;
  int listen_fd_{-1};
  std::uint16_t port_{0};
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::vector<std::shared_ptr<Connection>> connections_;
  std::vector<std::thread> workers_;
};

// Same session protocol over a pair of streams (stdin/stdout mode).
void serve_stream(const Scene& scene, const SessionOptions& options, std::istream& in, std::ostream& out);

// Splits "host:port"; throws std::invalid_argument on a malformed address.
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address);

}  // namespace gazedepth
