#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "seqbench/core/black_box.hpp"
#include "seqbench/isolation/wire.hpp"

namespace seqbench::isolation {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const { return host + ":" + std::to_string(port); }
};

/// "host:port" or ":port". Throws ConfigError.
Endpoint parse_endpoint(const std::string& text);

/// Connected stream socket; closes on destruction.
class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  Connection(Connection&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Connection& operator=(Connection&& other) noexcept;
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;
  ~Connection();

  /// Throws ConnectionError.
  static Connection connect(const Endpoint& endpoint);

  /// Throws ConnectionError when the peer is gone.
  void send(const WireMessage& msg);
  /// Throws ConnectionClosed at end of stream, ProtocolError on bad frames.
  WireMessage receive();
  void close();
  bool is_open() const noexcept { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

struct ServeOptions {
  /// Binding to anything but loopback needs this flag.
  bool allow_non_loopback = false;
  /// Stop after this many connections; unlimited when empty.
  std::optional<std::size_t> max_sessions;
  /// Called once the socket listens, with the bound port (useful for port 0).
  std::function<void(std::uint16_t)> on_listening;
};

/// Serves one connection at a time until a client sends shutdown (or
/// max_sessions is reached). Protocol errors are answered with an error
/// message and the connection is closed; the server keeps listening.
void serve_blackbox(std::shared_ptr<const Oracle> oracle, const Endpoint& endpoint,
                    const ServeOptions& options = {});

/// Client side of the protocol. Performs hello and info on connect.
class RemoteBackend final : public EvaluationBackend {
 public:
  /// Throws ConnectionError, ProtocolError or RemoteError.
  static std::shared_ptr<RemoteBackend> connect(const Endpoint& endpoint);

  ProblemInfo info() override { return info_; }
  /// Log messages arriving before the result go to the sink's log().
  std::vector<double> evaluate(std::span<const Sequence> batch) override;
  void set_log_sink(Observer* sink) override { sink_ = sink; }

  /// Asks the server to stop and waits for its ack.
  void shutdown_server();

 private:
  RemoteBackend(Connection conn, ProblemInfo info) : conn_(std::move(conn)), info_(std::move(info)) {}
  WireMessage request(const WireMessage& msg);

  Connection conn_;
  ProblemInfo info_;
  Observer* sink_ = nullptr;
};

/// Budgeted handle over a remote black box.
BlackBoxHandle remote_blackbox_client(const Endpoint& endpoint, std::size_t budget,
                                      std::string phase = "solve");

}  // namespace seqbench::isolation
