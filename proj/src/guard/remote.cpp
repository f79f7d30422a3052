#include "vpki/guard/remote.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <sstream>

namespace vpki::guard {

std::string handle_guard_line(SybilGuard& backend, const std::string& line) {
    std::istringstream in(line);
    std::string op, key_hex;
    in >> op >> key_hex;
    if (op.empty() || key_hex.empty()) return "ERR malformed";
    Bytes key;
    try {
        key = from_hex(key_hex);
    } catch (const std::exception&) {
        return "ERR bad key";
    }
    try {
        if (op == "CLAIMI") {
            uint64_t start, exp;
            if (!(in >> start >> exp)) return "ERR malformed";
            IntervalClaim c = backend.claim_ticket_interval(key, start, exp);
            if (!c.granted()) return "DENIED";
            return c.prev ? "GRANTED " + std::to_string(*c.prev) : "GRANTED";
        }
        if (op == "REVI") {
            std::string prev;
            if (!(in >> prev)) return "ERR malformed";
            backend.revert_ticket_interval(
                key, prev == "-" ? std::nullopt
                                 : std::optional<uint64_t>(std::stoull(prev)));
            return "GRANTED";
        }
        if (op == "CLAIMO") {
            return backend.claim_ticket_once(key) == Claim::Granted ? "GRANTED"
                                                                    : "DENIED";
        }
        if (op == "REVO") {
            backend.revert_ticket_once(key);
            return "GRANTED";
        }
    } catch (const GuardUnavailableError&) {
        return "ERR unavailable";
    }
    return "ERR unknown op";
}

GuardServer::GuardServer(std::shared_ptr<SybilGuard> backend, uint16_t port)
    : backend_(std::move(backend)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw std::runtime_error("guard server: socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
        ::listen(listen_fd_, 64) < 0) {
        ::close(listen_fd_);
        throw std::runtime_error("guard server: bind/listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

GuardServer::~GuardServer() { stop(); }

void GuardServer::stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    std::lock_guard lock(workers_mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    for (auto& w : workers_) {
        if (w.joinable()) w.join();
    }
    workers_.clear();
    client_fds_.clear();
}

void GuardServer::accept_loop() {
    while (running_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) break;
        std::lock_guard lock(workers_mu_);
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void GuardServer::serve_connection(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::string buffer;
    char chunk[1024];
    while (running_) {
        ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<size_t>(n));
        size_t pos;
        while ((pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            std::string reply = handle_guard_line(*backend_, line) + "\n";
            if (::send(fd, reply.data(), reply.size(), MSG_NOSIGNAL) < 0) {
                ::close(fd);
                return;
            }
        }
    }
    ::close(fd);
}

RemoteGuard::RemoteGuard(std::string host, uint16_t port)
    : host_(std::move(host)), port_(port) {}

RemoteGuard::~RemoteGuard() {
    if (fd_ >= 0) ::close(fd_);
}

void RemoteGuard::ensure_connected() {
    if (fd_ >= 0) return;
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw GuardUnavailableError("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port_);
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1 ||
        ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(fd);
        throw GuardUnavailableError("connect to guard backend failed");
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    fd_ = fd;
}

std::string RemoteGuard::request(const std::string& line) {
    std::lock_guard lock(mu_);
    ensure_connected();
    std::string framed = line + "\n";
    if (::send(fd_, framed.data(), framed.size(), MSG_NOSIGNAL) < 0) {
        ::close(fd_);
        fd_ = -1;
        throw GuardUnavailableError("send");
    }
    char chunk[256];
    size_t pos;
    while ((pos = rx_buffer_.find('\n')) == std::string::npos) {
        ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n <= 0) {
            ::close(fd_);
            fd_ = -1;
            throw GuardUnavailableError("recv");
        }
        rx_buffer_.append(chunk, static_cast<size_t>(n));
    }
    std::string reply = rx_buffer_.substr(0, pos);
    rx_buffer_.erase(0, pos + 1);
    if (reply.rfind("ERR", 0) == 0) throw GuardUnavailableError(reply);
    return reply;
}

IntervalClaim RemoteGuard::claim_ticket_interval(ByteView sn_ltc,
                                                 uint64_t tkt_start,
                                                 uint64_t tkt_exp) {
    std::string reply =
        request("CLAIMI " + to_hex(sn_ltc) + " " + std::to_string(tkt_start) +
                " " + std::to_string(tkt_exp));
    if (reply == "DENIED") return {Claim::Denied, std::nullopt};
    if (reply == "GRANTED") return {Claim::Granted, std::nullopt};
    return {Claim::Granted, std::stoull(reply.substr(8))};
}

void RemoteGuard::revert_ticket_interval(ByteView sn_ltc,
                                         std::optional<uint64_t> prev) {
    request("REVI " + to_hex(sn_ltc) + " " +
            (prev ? std::to_string(*prev) : std::string("-")));
}

Claim RemoteGuard::claim_ticket_once(ByteView sn_tkt) {
    return request("CLAIMO " + to_hex(sn_tkt)) == "GRANTED" ? Claim::Granted
                                                            : Claim::Denied;
}

void RemoteGuard::revert_ticket_once(ByteView sn_tkt) {
    request("REVO " + to_hex(sn_tkt));
}

}  // namespace vpki::guard
