#pragma once

#include <future>
#include <memory>
#include <thread>

#include "seqbench/isolation/remote.hpp"

namespace testsupport {

/// serve_blackbox on an ephemeral loopback port in a background thread.
/// The destructor asks the server to stop if it is still running.
class ServerThread {
 public:
  explicit ServerThread(std::shared_ptr<const seqbench::Oracle> oracle) {
    std::promise<std::uint16_t> bound;
    auto ready = bound.get_future();
    thread_ = std::thread([oracle, p = std::move(bound)]() mutable {
      seqbench::isolation::ServeOptions options;
      options.on_listening = [&](std::uint16_t port) { p.set_value(port); };
      try {
        seqbench::isolation::serve_blackbox(oracle, {"127.0.0.1", 0}, options);
      } catch (...) {
      }
    });
    port_ = ready.get();
  }

  ~ServerThread() { stop(); }

  void stop() {
    if (!thread_.joinable()) return;
    try {
      seqbench::isolation::RemoteBackend::connect(endpoint())->shutdown_server();
    } catch (...) {
    }
    thread_.join();
  }

  seqbench::isolation::Endpoint endpoint() const { return {"127.0.0.1", port_}; }

 private:
  std::thread thread_;
  std::uint16_t port_ = 0;
};

}  // namespace testsupport
