#include "texlayer/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <future>
#include <list>
#include <mutex>
#include <thread>

#include "texlayer/error.hpp"

namespace texlayer {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::kInvalidArgument, "endpoint must be host:port");
  Endpoint e;
  if (colon > 0) e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range("port");
    e.port = static_cast<std::uint16_t>(p);
  } catch (const std::logic_error&) {
    fail(ErrorCode::kInvalidArgument, "bad port '" + port + "'");
  }
  return e;
}

namespace {

class JobQueue {
 public:
  std::future<WireMessage> push(std::function<WireMessage()> job) {
    std::packaged_task<WireMessage()> task(std::move(job));
    auto result = task.get_future();
    {
      std::lock_guard lock(mutex_);
      jobs_.push_back(std::move(task));
    }
    cv_.notify_one();
    return result;
  }

  void run(std::stop_token stop) {
    for (;;) {
      std::packaged_task<WireMessage()> task;
      {
        std::unique_lock lock(mutex_);
        if (!cv_.wait(lock, stop, [&] { return !jobs_.empty(); })) return;
        task = std::move(jobs_.front());
        jobs_.pop_front();
      }
      task();
    }
  }

 private:
  std::mutex mutex_;
  std::condition_variable_any cv_;
  std::deque<std::packaged_task<WireMessage()>> jobs_;
};

}  // namespace

struct Server::State {
  Dispatcher& dispatcher;
  Endpoint endpoint;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::uint16_t bound_port = 0;
  JobQueue queue;
  std::jthread worker;
  std::thread accept_thread;

  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopping = false;
  bool stopped = false;
  std::list<std::shared_ptr<tcp::socket>> sockets;
  std::list<std::thread> connections;

  State(Dispatcher& d, Endpoint e) : dispatcher(d), endpoint(std::move(e)) {}

  void accept_loop() {
    for (;;) {
      auto socket = std::make_shared<tcp::socket>(io);
      beast::error_code ec;
      acceptor.accept(*socket, ec);
      std::lock_guard lock(mutex);
      if (stopping) return;
      if (ec) continue;
      sockets.push_back(socket);
      connections.emplace_back([this, socket] { session(socket); });
    }
  }

  void session(const std::shared_ptr<tcp::socket>& socket) {
    try {
      websocket::stream<tcp::socket&> ws(*socket);
      ws.accept();
      for (;;) {
        beast::flat_buffer buffer;
        ws.read(buffer);
        const bool binary = ws.got_binary();
        std::string frame = beast::buffers_to_string(buffer.data());
        WireMessage reply = queue
                                .push([this, frame = std::move(frame), binary] {
                                  return dispatcher.handle_frame(frame, binary);
                                })
                                .get();
        if (reply.payload.empty()) {
          ws.text(true);
          ws.write(asio::buffer(encode_text_frame(reply)));
        } else {
          ws.binary(true);
          ws.write(asio::buffer(encode_binary_frame(reply)));
        }
      }
    } catch (const std::exception&) {
      // closed by the peer or by stop()
    }
  }
};

Server::Server(Dispatcher& dispatcher, Endpoint endpoint)
    : state_(std::make_unique<State>(dispatcher, std::move(endpoint))) {}

Server::~Server() { stop(); }

void Server::start() {
  State& s = *state_;
  try {
    const tcp::endpoint ep(asio::ip::make_address(s.endpoint.host), s.endpoint.port);
    s.acceptor.open(ep.protocol());
    s.acceptor.set_option(asio::socket_base::reuse_address(true));
    s.acceptor.bind(ep);
    s.acceptor.listen();
    s.bound_port = s.acceptor.local_endpoint().port();
  } catch (const std::exception& e) {
    fail(ErrorCode::kBindFailure,
         "cannot listen on " + s.endpoint.host + ":" + std::to_string(s.endpoint.port) + ": " +
             e.what());
  }
  s.worker = std::jthread([&s](std::stop_token stop) { s.queue.run(stop); });
  s.accept_thread = std::thread([&s] { s.accept_loop(); });
}

std::uint16_t Server::port() const { return state_->bound_port; }

void Server::stop() {
  State& s = *state_;
  {
    std::lock_guard lock(s.mutex);
    if (s.stopping || !s.accept_thread.joinable()) return;
    s.stopping = true;
  }
  // Wake the blocking accept with a throwaway connection.
  try {
    tcp::socket poke(s.io);
    poke.connect(tcp::endpoint(asio::ip::make_address(s.endpoint.host == "0.0.0.0"
                                                          ? std::string("127.0.0.1")
                                                          : s.endpoint.host),
                               s.bound_port));
  } catch (const std::exception&) {
  }
  s.accept_thread.join();
  beast::error_code ec;
  s.acceptor.close(ec);
  {
    std::lock_guard lock(s.mutex);
    for (auto& socket : s.sockets) {
      socket->shutdown(tcp::socket::shutdown_both, ec);
    }
  }
  for (auto& t : s.connections) t.join();
  s.worker.request_stop();
  if (s.worker.joinable()) s.worker.join();
  {
    std::lock_guard lock(s.mutex);
    s.stopped = true;
  }
  s.stopped_cv.notify_all();
}

void Server::wait() {
  State& s = *state_;
  std::unique_lock lock(s.mutex);
  s.stopped_cv.wait(lock, [&] { return s.stopped; });
}

}  // namespace texlayer
