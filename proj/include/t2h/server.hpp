#pragma once

// Live operation over TCP. One tick thread owns the Session. Each client has
// a reader thread that posts into a latest-wins input mailbox and a control
// queue, and a writer thread draining a bounded outbound queue that drops its
// oldest message when full, so a slow client never stalls the tick.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "t2h/protocol.hpp"
#include "t2h/script.hpp"
#include "t2h/session_config.hpp"

namespace t2h::net {

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 0;  ///< 0 picks an ephemeral port
  std::optional<std::uint64_t> max_ticks;
  std::optional<std::filesystem::path> log_path;
  bool record_frames = false;
  std::size_t outbound_queue = 256;
  /// Ticks an input stays fresh after arrival; later ticks see no input.
  int input_hold_ticks = 1;
};

struct ServerStats {
  std::uint64_t ticks = 0;
  std::uint64_t inputs_received = 0;
  std::uint64_t controls_received = 0;
  std::uint64_t rejected_messages = 0;
  std::uint64_t dropped_outbound = 0;
  std::uint64_t clients_connected = 0;
};

class Server {
 public:
  Server(session::SessionConfig config, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the accept and tick threads. Returns the bound port.
  std::uint16_t start();
  /// Idempotent; joins every thread and closes the log.
  void stop();
  /// Blocks until max_ticks is reached or stop() is called.
  void wait();

  std::uint16_t port() const noexcept { return port_; }
  ServerStats stats() const;

 private:
  struct Peer;

  void accept_loop();
  void tick_loop();
  void reader_loop(const std::shared_ptr<Peer>& peer);
  static void writer_loop(const std::shared_ptr<Peer>& peer);
  void broadcast(const std::string& frame);
  void reap_clients();

  session::SessionConfig config_;
  ServerOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<bool> finished_{false};

  std::thread accept_thread_;
  std::thread tick_thread_;

  mutable std::mutex clients_mutex_;
  std::list<std::shared_ptr<Peer>> clients_;

  std::mutex mailbox_mutex_;
  std::optional<command::ControllerInput> latest_input_;
  std::uint64_t latest_input_tick_ = 0;  ///< first tick that reads the input
  std::uint64_t next_read_tick_ = 0;     ///< tick that will next drain the mailbox
  std::deque<session::ControlMessage> pending_controls_;

  mutable std::mutex stats_mutex_;
  ServerStats stats_;

  std::mutex done_mutex_;
  std::condition_variable done_cv_;
};

/// Blocking client helper for tests and tools.
class Client {
 public:
  Client(const std::string& host, std::uint16_t port);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send(const nlohmann::json& message);
  /// Waits up to `timeout_ms` for the next message; nullopt on timeout.
  std::optional<nlohmann::json> receive(int timeout_ms);
  void close();

 private:
  int fd_ = -1;
  FrameDecoder decoder_;
};

}  // namespace t2h::net
