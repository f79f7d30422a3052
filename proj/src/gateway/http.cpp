#include "vpki/gateway/http.hpp"

#include <chrono>

#include <httplib.h>

namespace vpki::gateway {

namespace {

uint64_t steady_ms() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

constexpr const char* kJson = "application/json";

}  // namespace

HttpServer::HttpServer() : srv_(std::make_unique<httplib::Server>()) {}

HttpServer::~HttpServer() { stop(); }

void HttpServer::post_route(const std::string& path, Handler fn) {
    srv_->Post(path, [this, fn = std::move(fn)](const httplib::Request& req,
                                                httplib::Response& res) {
        gauge_.op_started();
        uint64_t t0 = steady_ms();
        Json out;
        try {
            out = fn(Json::parse(req.body));
        } catch (const std::exception& e) {
            out = envelope_err({Err::BadRequest, e.what()});
        }
        res.set_content(out.dump(), kJson);
        gauge_.op_finished(steady_ms() - t0);
    });
}

void HttpServer::get_route(const std::string& path,
                           std::function<Json()> fn) {
    srv_->Get(path, [fn = std::move(fn)](const httplib::Request&,
                                         httplib::Response& res) {
        res.set_content(fn().dump(), kJson);
    });
}

void HttpServer::mount_health(std::function<Json()> health) {
    get_route("/v1/health", health);
    get_route("/v1/metrics", [this, health = std::move(health)] {
        Json h = health();
        return Json{{"load", gauge_.utilization()},
                    {"in_flight", gauge_.in_flight()},
                    {"healthy", h.value("healthy", false)}};
    });
}

void HttpServer::mount_ltca(ltca::Ltca& svc) {
    post_route("/v1/register", [&svc](const Json& j) {
        auto out = svc.register_vehicle(bytes_from_json(j.at("public_key")),
                                        j.at("valid_from").get<uint64_t>(),
                                        j.at("valid_to").get<uint64_t>());
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(Json{{"ltc", bytes_to_json(out.value().to_bytes())}});
    });
    post_route("/v1/ticket", [&svc](const Json& j) {
        auto out = svc.issue_ticket(ticket_request_from_json(j));
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(to_json(out.value()));
    });
    post_route("/v1/foreign-ticket", [&svc](const Json& j) {
        auto out =
            svc.issue_foreign_ticket(foreign_ticket_request_from_json(j));
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(to_json(out.value()));
    });
    mount_health([&svc] {
        auto h = svc.health_selfcheck();
        return Json{{"healthy", h.healthy}, {"stage", h.stage}};
    });
}

void HttpServer::mount_pca(pca::Pca& svc) {
    post_route("/v1/pseudonyms", [&svc](const Json& j) {
        auto out = svc.issue_pseudonyms(pseudonym_request_from_json(j));
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(to_json(out.value()));
    });
    post_route("/v1/resolve", [&svc](const Json& j) {
        auto out = svc.resolve_pseudonym(resolve_request_from_json(j));
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(to_json(out.value()));
    });
    mount_health([&svc] {
        auto h = svc.health_selfcheck();
        return Json{{"healthy", h.healthy}, {"stage", h.stage}};
    });
}

void HttpServer::mount_ra(ra::Ra& svc) {
    post_route("/v1/validate", [&svc](const Json& j) {
        auto out = svc.validate_issuance(report_envelope_from_json(j));
        if (!out.ok()) return envelope_err(out.error());
        return envelope_ok(to_json(out.value()));
    });
    mount_health([] { return Json{{"healthy", true}, {"stage", ""}}; });
}

void HttpServer::mount_discovery(Registry registry) {
    srv_->Get("/v1/domains/([^/]+)",
              [registry = std::move(registry)](const httplib::Request& req,
                                               httplib::Response& res) {
                  auto out = registry.discover(req.matches[1]);
                  Json body = out.ok() ? envelope_ok(to_json(out.value()))
                                       : envelope_err(out.error());
                  res.set_content(body.dump(), kJson);
              });
}

int HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = srv_->bind_to_any_port(host);
    } else if (!srv_->bind_to_port(host, port)) {
        throw std::runtime_error("cannot bind " + host + ":" +
                                 std::to_string(port));
    }
    thread_ = std::thread([this] { srv_->listen_after_bind(); });
    srv_->wait_until_ready();
    return bound;
}

void HttpServer::stop() {
    if (srv_) srv_->stop();
    if (thread_.joinable()) thread_.join();
}

HttpClient::HttpClient(const std::string& host, int port)
    : cli_(std::make_unique<httplib::Client>(host, port)) {
    cli_->set_connection_timeout(5);
    cli_->set_read_timeout(30);
}

HttpClient::~HttpClient() = default;

Outcome<Json> HttpClient::post_json(const std::string& path,
                                    const Json& body) {
    auto res = cli_->Post(path, body.dump(), kJson);
    if (!res) return Error{Err::BadRequest, "transport: " + to_string(res.error())};
    try {
        return Json::parse(res->body);
    } catch (const std::exception& e) {
        return Error{Err::BadRequest, std::string("bad json: ") + e.what()};
    }
}

Outcome<Json> HttpClient::get_json(const std::string& path) {
    auto res = cli_->Get(path);
    if (!res) return Error{Err::BadRequest, "transport: " + to_string(res.error())};
    try {
        return Json::parse(res->body);
    } catch (const std::exception& e) {
        return Error{Err::BadRequest, std::string("bad json: ") + e.what()};
    }
}

Outcome<LongTermCertificate> HttpClient::register_vehicle(
    const Bytes& public_key, uint64_t valid_from, uint64_t valid_to) {
    auto j = post_json("/v1/register",
                       Json{{"public_key", bytes_to_json(public_key)},
                            {"valid_from", valid_from},
                            {"valid_to", valid_to}});
    if (!j.ok()) return j.error();
    return unwrap<LongTermCertificate>(j.value(), [](const Json& v) {
        return LongTermCertificate::from_bytes(bytes_from_json(v.at("ltc")));
    });
}

Outcome<ltca::TicketResponse> HttpClient::issue_ticket(
    const ltca::TicketRequest& r) {
    auto j = post_json("/v1/ticket", to_json(r));
    if (!j.ok()) return j.error();
    return unwrap<ltca::TicketResponse>(j.value(), ticket_response_from_json);
}

Outcome<ltca::TicketResponse> HttpClient::issue_foreign_ticket(
    const ltca::ForeignTicketRequest& r) {
    auto j = post_json("/v1/foreign-ticket", to_json(r));
    if (!j.ok()) return j.error();
    return unwrap<ltca::TicketResponse>(j.value(), ticket_response_from_json);
}

Outcome<pca::PseudonymResponse> HttpClient::issue_pseudonyms(
    const pca::PseudonymRequest& r) {
    auto j = post_json("/v1/pseudonyms", to_json(r));
    if (!j.ok()) return j.error();
    return unwrap<pca::PseudonymResponse>(j.value(),
                                          pseudonym_response_from_json);
}

Outcome<pca::Resolution> HttpClient::resolve(const pca::ResolveRequest& r) {
    auto j = post_json("/v1/resolve", to_json(r));
    if (!j.ok()) return j.error();
    return unwrap<pca::Resolution>(j.value(), resolution_from_json);
}

Outcome<ra::ValidationReport> HttpClient::validate(
    const ra::ReportEnvelope& r) {
    auto j = post_json("/v1/validate", to_json(r));
    if (!j.ok()) return j.error();
    return unwrap<ra::ValidationReport>(j.value(),
                                        validation_report_from_json);
}

Outcome<DomainDescriptor> HttpClient::discover(const std::string& domain_id) {
    auto j = get_json("/v1/domains/" + domain_id);
    if (!j.ok()) return j.error();
    return unwrap<DomainDescriptor>(j.value(), domain_descriptor_from_json);
}

Outcome<HttpClient::Metrics> HttpClient::metrics() {
    auto j = get_json("/v1/metrics");
    if (!j.ok()) return j.error();
    try {
        Metrics m;
        m.load = j.value().at("load").get<double>();
        m.in_flight = j.value().at("in_flight").get<uint64_t>();
        m.healthy = j.value().at("healthy").get<bool>();
        return m;
    } catch (const std::exception& e) {
        return Error{Err::BadRequest, e.what()};
    }
}

Outcome<bool> HttpClient::healthy() {
    auto j = get_json("/v1/health");
    if (!j.ok()) return j.error();
    try {
        return j.value().at("healthy").get<bool>();
    } catch (const std::exception& e) {
        return Error{Err::BadRequest, e.what()};
    }
}

}  // namespace vpki::gateway
