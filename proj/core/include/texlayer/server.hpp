#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "texlayer/protocol.hpp"

namespace texlayer {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parses "host:port" or ":port". Port 0 asks the OS for a free port.
Endpoint parse_endpoint(const std::string& text);

/// WebSocket front end for a Dispatcher. Each connection gets a reader
/// thread; all requests run on one worker in arrival order.
class Server {
 public:
  Server(Dispatcher& dispatcher, Endpoint endpoint);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Throws BindFailure.
  void start();
  std::uint16_t port() const;
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace texlayer
