#ifndef VPKI_GATEWAY_HTTP_HPP
#define VPKI_GATEWAY_HTTP_HPP

#include <memory>
#include <string>
#include <thread>

#include "vpki/gateway/codec.hpp"
#include "vpki/gateway/discovery.hpp"
#include "vpki/gateway/gauge.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace vpki::gateway {

// HTTP/1.1 + JSON binding for one service instance. Mount whichever service
// this process hosts, then start(); handlers run on the server's pool and
// feed the load gauge.
class HttpServer {
public:
    HttpServer();
    ~HttpServer();

    void mount_ltca(ltca::Ltca& svc);
    void mount_pca(pca::Pca& svc);
    void mount_ra(ra::Ra& svc);
    void mount_discovery(Registry registry);

    // Binds and serves on a background thread; port 0 picks a free port.
    // Returns the bound port.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();

    LoadGauge& gauge() { return gauge_; }

private:
    using Handler = std::function<Json(const Json&)>;
    void post_route(const std::string& path, Handler fn);
    void get_route(const std::string& path, std::function<Json()> fn);
    void mount_health(std::function<Json()> health);

    std::unique_ptr<httplib::Server> srv_;
    std::thread thread_;
    LoadGauge gauge_;
};

class HttpClient {
public:
    HttpClient(const std::string& host, int port);
    ~HttpClient();

    Outcome<LongTermCertificate> register_vehicle(const Bytes& public_key,
                                                  uint64_t valid_from,
                                                  uint64_t valid_to);
    Outcome<ltca::TicketResponse> issue_ticket(const ltca::TicketRequest& r);
    Outcome<ltca::TicketResponse> issue_foreign_ticket(
        const ltca::ForeignTicketRequest& r);
    Outcome<pca::PseudonymResponse> issue_pseudonyms(
        const pca::PseudonymRequest& r);
    Outcome<pca::Resolution> resolve(const pca::ResolveRequest& r);
    Outcome<ra::ValidationReport> validate(const ra::ReportEnvelope& r);
    Outcome<DomainDescriptor> discover(const std::string& domain_id);

    struct Metrics {
        double load = 0.0;
        uint64_t in_flight = 0;
        bool healthy = false;
    };
    Outcome<Metrics> metrics();
    Outcome<bool> healthy();

private:
    Outcome<Json> post_json(const std::string& path, const Json& body);
    Outcome<Json> get_json(const std::string& path);

    std::unique_ptr<httplib::Client> cli_;
};

}  // namespace vpki::gateway

#endif
