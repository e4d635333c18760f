#include "portalens/io/server.hpp"

#include "portalens/error.hpp"
#include "portalens/io/wire.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace portalens {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
    throw std::runtime_error(what + ": " + std::strerror(errno));
}

bool write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(std::size_t(n));
    }
    return true;
}

// Appends received bytes to buf; false on EOF or error.
bool fill(int fd, std::string& buf) {
    char chunk[4096];
    for (;;) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        buf.append(chunk, std::size_t(n));
        return true;
    }
}

} // namespace

Server::Server(std::shared_ptr<const Dataset> dataset, EngineConfig cfg, std::uint16_t port)
    : dataset_(std::move(dataset)), cfg_(std::move(cfg)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) sys_fail("socket");
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(listen_fd_);
        throw InputError("cannot bind 127.0.0.1:" + std::to_string(port) + ": " + std::strerror(errno));
    }
    if (::listen(listen_fd_, 16) < 0) sys_fail("listen");
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Server::~Server() {
    stop();
    for (auto& t : workers_)
        if (t.joinable()) t.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::run() {
    while (!stopping_) {
        pollfd p{listen_fd_, POLLIN, 0};
        const int r = ::poll(&p, 1, 100);
        if (r <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        conns_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
    stop();
}

void Server::stop() {
    std::lock_guard lock(mu_);
    stopping_ = true;
    for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
}

void Server::serve_connection(int fd) {
    WireSession session(dataset_, cfg_);
    std::string buf;
    bool open = true;
    while (open && fill(fd, buf)) {
        std::size_t nl;
        while (open && (nl = buf.find('\n')) != std::string::npos) {
            std::string line = buf.substr(0, nl);
            buf.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const WireReply reply = session.handle(line);
            for (const auto& out : reply.lines)
                if (!write_all(fd, out + '\n')) open = false;
            if (reply.close) open = false;
        }
    }
    std::lock_guard lock(mu_);
    conns_.erase(std::remove(conns_.begin(), conns_.end(), fd), conns_.end());
    ::close(fd);
}

LineClient::LineClient(const std::string& host, std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) sys_fail("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw InputError("bad address " + host);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd_);
        sys_fail("connect");
    }
}

LineClient::~LineClient() {
    if (fd_ >= 0) ::close(fd_);
}

void LineClient::send_line(const std::string& line) {
    if (!write_all(fd_, line + '\n')) sys_fail("send");
}

bool LineClient::read_line(std::string& line) {
    std::size_t nl;
    while ((nl = buf_.find('\n')) == std::string::npos)
        if (!fill(fd_, buf_)) return false;
    line = buf_.substr(0, nl);
    buf_.erase(0, nl + 1);
    return true;
}

std::string LineClient::request(const std::string& line) {
    send_line(line);
    std::string out;
    if (!read_line(out)) throw std::runtime_error("connection closed");
    return out;
}

} // namespace portalens
