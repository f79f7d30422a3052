#ifndef VPKI_GUARD_REMOTE_HPP
#define VPKI_GUARD_REMOTE_HPP

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "vpki/guard/guard.hpp"

namespace vpki::guard {

// External-backend adapter speaking a minimal line protocol, for multi-process
// deployments where replicas cannot share an in-process store:
//
//   CLAIMI <key-hex> <start> <exp>   ->  GRANTED [prev] | DENIED
//   REVI   <key-hex> <prev|->        ->  GRANTED
//   CLAIMO <key-hex>                 ->  GRANTED | DENIED
//   REVO   <key-hex>                 ->  GRANTED
//
// One request per line; responses come back in request order.

// Parses one request line against a backing guard and renders the reply.
// Exposed separately so the protocol is testable without sockets.
std::string handle_guard_line(SybilGuard& backend, const std::string& line);

class GuardServer {
public:
    // Binds 127.0.0.1:port; port 0 picks a free port.
    GuardServer(std::shared_ptr<SybilGuard> backend, uint16_t port = 0);
    ~GuardServer();

    uint16_t port() const { return port_; }
    void stop();

private:
    void accept_loop();
    void serve_connection(int fd);

    std::shared_ptr<SybilGuard> backend_;
    int listen_fd_ = -1;
    uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
    std::vector<int> client_fds_;
};

// SybilGuard implementation talking to a GuardServer. Connection failures
// surface as GuardUnavailableError.
class RemoteGuard : public SybilGuard {
public:
    RemoteGuard(std::string host, uint16_t port);
    ~RemoteGuard() override;

    IntervalClaim claim_ticket_interval(ByteView sn_ltc, uint64_t tkt_start,
                                        uint64_t tkt_exp) override;
    void revert_ticket_interval(ByteView sn_ltc,
                                std::optional<uint64_t> prev) override;
    Claim claim_ticket_once(ByteView sn_tkt) override;
    void revert_ticket_once(ByteView sn_tkt) override;

private:
    std::string request(const std::string& line);
    void ensure_connected();

    std::string host_;
    uint16_t port_;
    std::mutex mu_;
    int fd_ = -1;
    std::string rx_buffer_;
};

}  // namespace vpki::guard

#endif
