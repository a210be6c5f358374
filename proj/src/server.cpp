#include "gazedepth/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <stdexcept>

#include "gazedepth/trace_io.hpp"

namespace gazedepth {

std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("listen address must be host:port, got '" + address + "'");
  std::string host = address.substr(0, colon);
  const std::string port_text = address.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  unsigned long port = 0;
  if (port_text.empty() || !std::isdigit(static_cast<unsigned char>(port_text[0])))
    throw std::invalid_argument("listen address has a bad port: '" + port_text + "'");
  try {
    std::size_t used = 0;
    port = std::stoul(port_text, &used);
    if (used != port_text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw std::invalid_argument("listen address has a bad port: '" + port_text + "'");
  }
  if (port > 65535) throw std::invalid_argument("listen address port out of range: " + port_text);
  return {host, static_cast<std::uint16_t>(port)};
}

struct SessionServer::Connection {
  int fd{-1};
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> queue;
  bool eof{false};
  bool overflow{false};
};

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

SessionServer::SessionServer(const Scene& scene, ServerOptions options) : scene_(&scene), options_(options) {
  if (options_.queue_bound == 0) throw std::invalid_argument("queue_bound must be > 0");
}

SessionServer::~SessionServer() { stop(); }

std::uint16_t SessionServer::start(const std::string& host, std::uint16_t port) {
  if (running_) throw std::logic_error("SessionServer already started");
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
    throw std::runtime_error("cannot resolve listen host '" + host + "'");
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(port);

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
  return port_;
}

void SessionServer::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 50);
    if (ready <= 0 || !(pfd.revents & POLLIN)) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(conn_mutex_);
    connections_.push_back(conn);
    workers_.emplace_back([this, conn] { run_connection(conn); });
  }
}

void SessionServer::run_connection(std::shared_ptr<Connection> conn) {
  const std::size_t bound = options_.queue_bound;
  std::thread reader([conn, bound] {
    std::string pending;
    char buf[4096];
    while (true) {
      const ssize_t n = ::recv(conn->fd, buf, sizeof(buf), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      pending.append(buf, static_cast<std::size_t>(n));
      std::size_t start = 0;
      std::size_t nl;
      bool overflow = false;
      {
        std::lock_guard lock(conn->mutex);
        while ((nl = pending.find('\n', start)) != std::string::npos) {
          if (conn->queue.size() >= bound) {
            overflow = true;
            break;
          }
          conn->queue.emplace_back(pending, start, nl - start);
          start = nl + 1;
        }
        if (overflow) conn->overflow = true;
      }
      pending.erase(0, start);
      conn->cv.notify_one();
      if (overflow) return;
    }
    std::lock_guard lock(conn->mutex);
    if (!pending.empty()) conn->queue.push_back(pending);
    conn->eof = true;
    conn->cv.notify_one();
  });

  Session session(*scene_, options_.session);
  while (true) {
    std::string line;
    bool overflow = false;
    {
      std::unique_lock lock(conn->mutex);
      conn->cv.wait(lock, [&] { return !conn->queue.empty() || conn->eof || conn->overflow; });
      if (conn->overflow) {
        overflow = true;
      } else if (conn->queue.empty()) {
        break;  // eof with nothing left
      } else {
        line = std::move(conn->queue.front());
        conn->queue.pop_front();
      }
    }
    if (overflow) {
      send_all(conn->fd, format_error_line(session.last_timestamp(), "input queue overflow; closing session") + "\n");
      break;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string out;
    for (const auto& l : session.process_line(line)) {
      out += l;
      out += '\n';
    }
    if (!out.empty() && !send_all(conn->fd, out)) break;
  }
  ::shutdown(conn->fd, SHUT_RDWR);
  reader.join();
  std::lock_guard lock(conn->mutex);
  ::close(conn->fd);
  conn->fd = -1;
}

void SessionServer::stop() {
  if (!running_.exchange(false)) return;
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(conn_mutex_);
    for (auto& c : connections_) {
      std::lock_guard conn_lock(c->mutex);
      if (c->fd >= 0) ::shutdown(c->fd, SHUT_RDWR);
    }
    workers.swap(workers_);
    connections_.clear();
  }
  for (auto& w : workers) w.join();
}

void SessionServer::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void serve_stream(const Scene& scene, const SessionOptions& options, std::istream& in, std::ostream& out) {
  Session session(scene, options);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    for (const auto& l : session.process_line(line)) out << l << '\n';
    out.flush();
  }
}

}  // namespace gazedepth
