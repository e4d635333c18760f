#pragma once

#include "portalens/engine.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace portalens {

/// Line-oriented TCP endpoint on 127.0.0.1 speaking the wire protocol. Each
/// accepted connection gets its own thread and WireSession; the dataset is
/// shared read-only.
class Server {
public:
    /// Binds immediately; port 0 picks a free port (see port()).
    Server(std::shared_ptr<const Dataset> dataset, EngineConfig cfg, std::uint16_t port);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return port_; }

    /// Accept loop; returns after stop().
    void run();
    /// Thread-safe. Closes the listener and every open connection.
    void stop();
    /// Async-signal-safe: only flags the accept loop, which then calls stop().
    void request_stop() { stopping_ = true; }

private:
    void serve_connection(int fd);

    std::shared_ptr<const Dataset> dataset_;
    EngineConfig cfg_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex mu_;
    std::vector<int> conns_;
    std::vector<std::thread> workers_;
};

/// Minimal blocking client, for tests and scripted sessions.
class LineClient {
public:
    LineClient(const std::string& host, std::uint16_t port);
    ~LineClient();
    LineClient(const LineClient&) = delete;
    LineClient& operator=(const LineClient&) = delete;

    void send_line(const std::string& line);
    /// Empty optional-like result: returns false when the peer closed.
    bool read_line(std::string& line);
    std::string request(const std::string& line); ///< send, then read one line

private:
    int fd_ = -1;
    std::string buf_;
};

} // namespace portalens
