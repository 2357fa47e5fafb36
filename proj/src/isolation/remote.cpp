#include "seqbench/isolation/remote.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "seqbench/core/error.hpp"

namespace seqbench::isolation {

namespace {

std::string errno_text() { return std::strerror(errno); }

struct AddrInfo {
  addrinfo* list = nullptr;
  ~AddrInfo() {
    if (list != nullptr) freeaddrinfo(list);
  }
};

void resolve(const Endpoint& endpoint, bool passive, AddrInfo& out) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  const std::string port = std::to_string(endpoint.port);
  const int rc = getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &out.list);
  if (rc != 0) {
    throw Error(ErrorCode::ConnectionError, "cannot resolve " + endpoint.to_string() + ": " + gai_strerror(rc));
  }
}

bool is_loopback(const sockaddr* addr) {
  if (addr->sa_family == AF_INET) {
    const auto* in = reinterpret_cast<const sockaddr_in*>(addr);
    return (ntohl(in->sin_addr.s_addr) >> 24) == 127;
  }
  if (addr->sa_family == AF_INET6) {
    const auto* in6 = reinterpret_cast<const sockaddr_in6*>(addr);
    return IN6_IS_ADDR_LOOPBACK(&in6->sin6_addr);
  }
  return false;
}

std::uint16_t bound_port(int fd) {
  sockaddr_storage addr{};
  socklen_t len = sizeof addr;
  if (getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return 0;
  if (addr.ss_family == AF_INET) return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  if (addr.ss_family == AF_INET6) return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  return 0;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "endpoint '" + text + "' lacks ':port'");
  Endpoint ep;
  if (colon > 0) ep.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long value = std::stoul(port, &used);
    if (used != port.size() || value > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(value);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "bad port in endpoint '" + text + "'");
  }
  return ep;
}

Connection& Connection::operator=(Connection&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Connection::~Connection() { close(); }

void Connection::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Connection Connection::connect(const Endpoint& endpoint) {
  AddrInfo info;
  resolve(endpoint, false, info);
  std::string last_error = "no address";
  for (addrinfo* a = info.list; a != nullptr; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_error = errno_text();
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      const int one = 1;
      setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Connection(fd);
    }
    last_error = errno_text();
    ::close(fd);
  }
  throw Error(ErrorCode::ConnectionError, "cannot connect to " + endpoint.to_string() + ": " + last_error);
}

void Connection::send(const WireMessage& msg) {
  if (fd_ < 0) throw Error(ErrorCode::ConnectionError, "connection is closed");
  const std::string frame = encode_message(msg);
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t k = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ConnectionError, "send failed: " + errno_text());
    }
    sent += static_cast<std::size_t>(k);
  }
}

WireMessage Connection::receive() {
  if (fd_ < 0) throw Error(ErrorCode::ConnectionClosed, "connection is closed");
  return read_message([this](char* dst, std::size_t n) -> std::size_t {
    for (;;) {
      const ssize_t k = ::recv(fd_, dst, n, 0);
      if (k >= 0) return static_cast<std::size_t>(k);
      if (errno == EINTR) continue;
      return 0;
    }
  });
}

namespace {

/// Returns false when the server should stop.
bool serve_session(const Oracle& oracle, Connection& conn) {
  const ProblemInfo& info = oracle.info();
  std::size_t session_calls = 0;
  bool greeted = false;
  for (;;) {
    WireMessage msg;
    try {
      msg = conn.receive();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ProtocolError) conn.send(make_error("protocol", e.what()));
      return true;
    }

    if (!greeted) {
      if (msg.type != MessageType::Hello) {
        conn.send(make_error("protocol", "expected hello, got " + std::string(to_string(msg.type))));
        return true;
      }
      const auto version = msg.payload.at("version").get<std::string>();
      if (version != kProtocolVersion) {
        conn.send(make_error("version", "server speaks " + std::string(kProtocolVersion) + ", client sent " + version));
        return true;
      }
      conn.send({MessageType::Ack, {{"version", std::string(kProtocolVersion)}}});
      greeted = true;
      continue;
    }

    switch (msg.type) {
      case MessageType::Info:
        conn.send({MessageType::Info, {{"problem", to_json(info)}}});
        break;
      case MessageType::Evaluate: {
        std::vector<double> scores;
        try {
          std::vector<Sequence> batch;
          for (const auto& tokens : msg.payload.at("sequences")) {
            batch.push_back(from_tokens(tokens.get<std::vector<std::string>>(), info.alphabet));
            validate_sequence(batch.back(), info);
          }
          scores.reserve(batch.size());
          for (const auto& seq : batch) scores.push_back(oracle.score(seq));
        } catch (const Error& e) {
          conn.send(make_error(std::string(to_string(e.code())), e.what()));
          break;
        }
        session_calls += scores.size();
        conn.send({MessageType::Log,
                   {{"message", {{"event", "evaluated"}, {"batch", scores.size()}, {"session_calls", session_calls}}}}});
        conn.send({MessageType::Result, {{"scores", scores}}});
        break;
      }
      case MessageType::Shutdown:
        conn.send({MessageType::Ack, nlohmann::json::object()});
        return false;
      default:
        conn.send(make_error("protocol", "unexpected " + std::string(to_string(msg.type)) + " from client"));
        return true;
    }
  }
}

}  // namespace

void serve_blackbox(std::shared_ptr<const Oracle> oracle, const Endpoint& endpoint, const ServeOptions& options) {
  AddrInfo info;
  resolve(endpoint, true, info);
  int listener = -1;
  std::string last_error = "no address";
  for (addrinfo* a = info.list; a != nullptr; a = a->ai_next) {
    if (!options.allow_non_loopback && !is_loopback(a->ai_addr)) {
      last_error = "refusing non-loopback address without the explicit flag";
      continue;
    }
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_error = errno_text();
      continue;
    }
    const int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 8) == 0) {
      listener = fd;
      break;
    }
    last_error = errno_text();
    ::close(fd);
  }
  if (listener < 0) throw Error(ErrorCode::ConnectionError, "cannot listen on " + endpoint.to_string() + ": " + last_error);
  Connection guard(listener);
  if (options.on_listening) options.on_listening(bound_port(listener));

  std::size_t sessions = 0;
  bool running = true;
  while (running && (!options.max_sessions || sessions < *options.max_sessions)) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::ConnectionError, "accept failed: " + errno_text());
    }
    ++sessions;
    Connection conn(fd);
    try {
      running = serve_session(*oracle, conn);
    } catch (const Error& e) {
      // Peer vanished while we were answering; wait for the next client.
      if (e.code() != ErrorCode::ConnectionError) throw;
    }
  }
}

std::shared_ptr<RemoteBackend> RemoteBackend::connect(const Endpoint& endpoint) {
  Connection conn = Connection::connect(endpoint);
  auto exchange = [&](const WireMessage& msg, MessageType expected) {
    conn.send(msg);
    WireMessage reply;
    try {
      reply = conn.receive();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConnectionClosed) throw Error(ErrorCode::ConnectionError, e.what());
      throw;
    }
    if (reply.type == MessageType::Error) {
      throw Error(ErrorCode::RemoteError, reply.payload.at("code").get<std::string>() + ": " +
                                              reply.payload.at("message").get<std::string>());
    }
    if (reply.type != expected) {
      throw Error(ErrorCode::ProtocolError, "expected " + std::string(to_string(expected)) + ", got " +
                                                std::string(to_string(reply.type)));
    }
    return reply;
  };
  exchange({MessageType::Hello, {{"version", std::string(kProtocolVersion)}}}, MessageType::Ack);
  const auto reply = exchange({MessageType::Info, nlohmann::json::object()}, MessageType::Info);
  if (!reply.payload.contains("problem")) throw Error(ErrorCode::ProtocolError, "info reply without problem");
  ProblemInfo info = problem_info_from_json(reply.payload.at("problem"));
  return std::shared_ptr<RemoteBackend>(new RemoteBackend(std::move(conn), std::move(info)));
}

WireMessage RemoteBackend::request(const WireMessage& msg) {
  conn_.send(msg);
  for (;;) {
    WireMessage reply;
    try {
      reply = conn_.receive();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConnectionClosed) throw Error(ErrorCode::ConnectionError, e.what());
      throw;
    }
    if (reply.type == MessageType::Log) {
      if (sink_ != nullptr) sink_->log(reply.payload.at("message"));
      continue;
    }
    if (reply.type == MessageType::Error) {
      throw Error(ErrorCode::RemoteError, reply.payload.at("code").get<std::string>() + ": " +
                                              reply.payload.at("message").get<std::string>());
    }
    return reply;
  }
}

std::vector<double> RemoteBackend::evaluate(std::span<const Sequence> batch) {
  nlohmann::json sequences = nlohmann::json::array();
  for (const auto& seq : batch) sequences.push_back(to_tokens(seq, info_.alphabet));
  const WireMessage reply = request({MessageType::Evaluate, {{"sequences", std::move(sequences)}}});
  if (reply.type != MessageType::Result) {
    throw Error(ErrorCode::ProtocolError, "expected result, got " + std::string(to_string(reply.type)));
  }
  auto scores = reply.payload.at("scores").get<std::vector<double>>();
  if (scores.size() != batch.size()) {
    throw Error(ErrorCode::ProtocolError, "result carries " + std::to_string(scores.size()) +
                                              " scores for a batch of " + std::to_string(batch.size()));
  }
  return scores;
}

void RemoteBackend::shutdown_server() {
  const WireMessage reply = request({MessageType::Shutdown, nlohmann::json::object()});
  if (reply.type != MessageType::Ack) {
    throw Error(ErrorCode::ProtocolError, "expected ack, got " + std::string(to_string(reply.type)));
  }
  conn_.close();
}

BlackBoxHandle remote_blackbox_client(const Endpoint& endpoint, std::size_t budget, std::string phase) {
  return BlackBoxHandle(RemoteBackend::connect(endpoint), budget, std::move(phase));
}

}  // namespace seqbench::isolation
