#include "t2h/server.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <iostream>

#include "t2h/errors.hpp"
#include "t2h/protocol.hpp"
#include "t2h/replay_log.hpp"
#include "t2h/session.hpp"

namespace t2h::net {
namespace {

constexpr int kPollMs = 50;

bool send_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::runtime_error socket_error(const std::string& what) {
  return std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace

struct Server::Peer {
  int fd = -1;
  std::size_t capacity = 256;
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> outbound;
  std::uint64_t dropped = 0;
  std::atomic<bool> alive{true};
  std::thread reader;
  std::thread writer;

  void push(std::string frame) {
    {
      std::lock_guard lock(mutex);
      if (outbound.size() >= capacity) {
        outbound.pop_front();
        ++dropped;
      }
      outbound.push_back(std::move(frame));
    }
    cv.notify_one();
  }

  void shutdown() {
    alive = false;
    ::shutdown(fd, SHUT_RDWR);
    cv.notify_all();
  }
};

Server::Server(session::SessionConfig config, ServerOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
  config_.validate();
  if (options_.input_hold_ticks < 1) throw ConfigError("input_hold_ticks must be >= 1");
}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw socket_error("socket");
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.bind_address.c_str(), &addr.sin_addr) != 1) {
    throw ConfigError("bad bind address " + options_.bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw socket_error("bind");
  if (::listen(listen_fd_, 16) < 0) throw socket_error("listen");
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  tick_thread_ = std::thread([this] { tick_loop(); });
  return port_;
}

void Server::stop() {
  running_ = false;
  if (tick_thread_.joinable()) tick_thread_.join();
  if (accept_thread_.joinable()) accept_thread_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  std::list<std::shared_ptr<Peer>> peers;
  {
    std::lock_guard lock(clients_mutex_);
    peers.swap(clients_);
  }
  for (auto& p : peers) {
    p->shutdown();
    if (p->reader.joinable()) p->reader.join();
    if (p->writer.joinable()) p->writer.join();
    ::close(p->fd);
  }
  finished_ = true;
  done_cv_.notify_all();
}

void Server::wait() {
  std::unique_lock lock(done_mutex_);
  done_cv_.wait(lock, [this] { return finished_.load() || !running_.load(); });
}

ServerStats Server::stats() const {
  std::lock_guard lock(stats_mutex_);
  ServerStats s = stats_;
  std::lock_guard clock(clients_mutex_);
  for (const auto& p : clients_) {
    std::lock_guard plock(p->mutex);
    s.dropped_outbound += p->dropped;
  }
  return s;
}

void Server::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMs);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

    auto peer = std::make_shared<Peer>();
    peer->fd = fd;
    peer->capacity = options_.outbound_queue;
    peer->reader = std::thread([this, peer] { reader_loop(peer); });
    peer->writer = std::thread([peer] { writer_loop(peer); });
    {
      std::lock_guard lock(clients_mutex_);
      clients_.push_back(peer);
    }
    std::lock_guard lock(stats_mutex_);
    ++stats_.clients_connected;
  }
}

void Server::reader_loop(const std::shared_ptr<Peer>& peer) {
  FrameDecoder decoder;
  char buf[4096];
  while (running_ && peer->alive) {
    pollfd pfd{peer->fd, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kPollMs);
    if (ready == 0) continue;
    if (ready < 0 && errno == EINTR) continue;
    const ssize_t n = ready < 0 ? -1 : ::recv(peer->fd, buf, sizeof buf, 0);
    if (n <= 0) break;
    try {
      decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
      while (auto payload = decoder.next()) {
        try {
          auto msg = parse_client_message(*payload);
          std::lock_guard lock(mailbox_mutex_);
          if (auto* input = std::get_if<command::ControllerInput>(&msg)) {
            latest_input_ = *input;
            latest_input_tick_ = next_read_tick_;
            std::lock_guard slock(stats_mutex_);
            ++stats_.inputs_received;
          } else {
            pending_controls_.push_back(std::get<session::ControlMessage>(msg));
            std::lock_guard slock(stats_mutex_);
            ++stats_.controls_received;
          }
        } catch (const ProtocolError& e) {
          std::lock_guard slock(stats_mutex_);
          ++stats_.rejected_messages;
        }
      }
    } catch (const ProtocolError&) {
      break;  // framing is lost; drop the connection
    }
  }
  peer->shutdown();
}

void Server::writer_loop(const std::shared_ptr<Peer>& peer) {
  while (true) {
    std::string frame;
    {
      std::unique_lock lock(peer->mutex);
      peer->cv.wait(lock, [&] { return !peer->outbound.empty() || !peer->alive; });
      if (!peer->alive) return;
      frame = std::move(peer->outbound.front());
      peer->outbound.pop_front();
    }
    if (!send_all(peer->fd, frame)) {
      peer->shutdown();
      return;
    }
  }
}

void Server::broadcast(const std::string& frame) {
  std::lock_guard lock(clients_mutex_);
  for (auto& p : clients_) {
    if (p->alive) p->push(frame);
  }
}

void Server::reap_clients() {
  std::list<std::shared_ptr<Peer>> dead;
  {
    std::lock_guard lock(clients_mutex_);
    for (auto it = clients_.begin(); it != clients_.end();) {
      if (!(*it)->alive) {
        dead.push_back(*it);
        it = clients_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& p : dead) {
    if (p->reader.joinable()) p->reader.join();
    if (p->writer.joinable()) p->writer.join();
    std::lock_guard lock(stats_mutex_);
    stats_.dropped_outbound += p->dropped;
    ::close(p->fd);
  }
}

void Server::tick_loop() {
  session::Session session(config_);
  std::optional<session::LogWriter> log;
  if (options_.log_path) log.emplace(*options_.log_path, config_, "live", options_.record_frames);

  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(config_.dt()));
  auto deadline = clock::now();

  while (running_) {
    const std::uint64_t k = session.next_tick();
    if (options_.max_ticks && k >= *options_.max_ticks) break;

    session::OperatorTick op;
    {
      std::lock_guard lock(mailbox_mutex_);
      if (latest_input_ && k < latest_input_tick_ + static_cast<std::uint64_t>(options_.input_hold_ticks)) {
        op.input = latest_input_;
      }
      op.controls.assign(pending_controls_.begin(), pending_controls_.end());
      pending_controls_.clear();
      next_read_tick_ = k + 1;
    }

    const auto record = session.step(op);
    if (log) log->write(op, record, session);

    broadcast(encode_message(telemetry_message(record)));
    if (config_.tactile_stream_every > 0 && record.tick % static_cast<std::uint64_t>(config_.tactile_stream_every) == 0) {
      const auto shape = session.simulator().frame_shape();
      for (int s = 0; s < 2; ++s) {
        TactileMessage m{record.tick, s + 1, shape.width, shape.height,
                         session.last_frames()[static_cast<std::size_t>(s)]};
        broadcast(encode_message(tactile_message(m)));
      }
    }
    {
      std::lock_guard lock(stats_mutex_);
      stats_.ticks = session.next_tick();
    }
    reap_clients();

    deadline += period;
    const auto now = clock::now();
    if (deadline < now - 10 * period) deadline = now;  // fell far behind; do not burst
    std::this_thread::sleep_until(deadline);
  }
  if (log) log->close();
  finished_ = true;
  done_cv_.notify_all();
}

Client::Client(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw socket_error("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw ProtocolError("bad host " + host);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const auto err = socket_error("connect");
    ::close(fd_);
    fd_ = -1;
    throw err;
  }
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Client::~Client() { close(); }

void Client::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Client::send(const nlohmann::json& message) {
  if (fd_ < 0 || !send_all(fd_, encode_message(message))) throw ProtocolError("send failed");
}

std::optional<nlohmann::json> Client::receive(int timeout_ms) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[8192];
  while (true) {
    if (auto payload = decoder_.next()) return nlohmann::json::parse(*payload);
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (fd_ < 0) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    if (::poll(&pfd, 1, static_cast<int>(std::max<long long>(left, 0))) <= 0) {
      if (left <= 0) return std::nullopt;
      continue;
    }
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) {
      close();
      return std::nullopt;
    }
    decoder_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  }
}

}  // namespace t2h::net
