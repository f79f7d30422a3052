#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "vpki/gateway/codec.hpp"
#include "vpki/gateway/discovery.hpp"
#include "vpki/gateway/gauge.hpp"
#include "vpki/gateway/http.hpp"
#include "vpki/vehicle/client.hpp"

using namespace vpki;
using namespace vpki::gateway;

namespace {

constexpr uint64_t kNow = 1700000000;

CaIdentity make_ca(const std::string& id, const KeyPair& key,
                   const KeyPair& rca) {
    CaIdentity ca;
    ca.id = id;
    ca.certificate = rca_certify(rca, "rca", key.public_bytes(), 0,
                                 kNow + 10 * 365 * 86400);
    return ca;
}

}  // namespace

TEST_CASE("load gauge tracks busy fraction with an injected clock") {
    uint64_t t = 0;
    LoadGauge g([&] { return t; }, 10.0);

    SUBCASE("idle service reads near zero") {
        t = 60000;
        CHECK(g.utilization() < 0.01);
    }
    SUBCASE("saturated pool reads high") {
        // 1 second of wall time fully busy, repeated for a minute.
        for (int i = 0; i < 60; ++i) {
            g.op_started();
            t += 1000;
            g.op_finished(1000);
            g.utilization();
        }
        CHECK(g.utilization() >= 0.9);
        CHECK(g.utilization() <= 1.0);
    }
    SUBCASE("half-busy load converges near one half") {
        for (int i = 0; i < 120; ++i) {
            g.op_started();
            t += 1000;
            g.op_finished(500);
            g.utilization();
        }
        CHECK(g.utilization() > 0.4);
        CHECK(g.utilization() < 0.6);
    }
    SUBCASE("in-flight counts") {
        g.op_started();
        g.op_started();
        CHECK(g.in_flight() == 2);
        g.op_finished(1);
        CHECK(g.in_flight() == 1);
    }
}

TEST_CASE("key=value config parsing and environment overrides") {
    auto cfg = parse_config(
        "# comment\n"
        "tau_p = 300\n"
        "guard.policy=fail-close  # trailing comment\n"
        "\n"
        "domain.home.epoch=0\n");
    CHECK(cfg.at("tau_p") == "300");
    CHECK(cfg.at("guard.policy") == "fail-close");
    CHECK(cfg.at("domain.home.epoch") == "0");
    CHECK(cfg.size() == 3);

    setenv("VPKI_GUARD_POLICY", "fail-open", 1);
    apply_env_overrides(cfg);
    CHECK(cfg.at("guard.policy") == "fail-open");
    CHECK(cfg.at("tau_p") == "300");
    unsetenv("VPKI_GUARD_POLICY");
}

TEST_CASE("root certification and cross-domain trust") {
    KeyPair rca = KeyPair::generate();
    KeyPair ltca_key = KeyPair::generate();
    KeyPair pca1_key = KeyPair::generate();
    KeyPair pca2_key = KeyPair::generate();

    LongTermCertificate anchor =
        rca_certify(rca, "rca", rca.public_bytes(), 0, kNow + 1000000);
    LongTermCertificate ltca_cert =
        rca_certify(rca, "rca", ltca_key.public_bytes(), 0, kNow + 1000000);
    LongTermCertificate pca1_cert =
        rca_certify(rca, "rca", pca1_key.public_bytes(), 0, kNow + 1000000);
    LongTermCertificate pca2_cert =
        rca_certify(rca, "rca", pca2_key.public_bytes(), 0, kNow + 1000000);

    TrustStore store;
    store.add_anchor(anchor);
    CHECK(store.validate(ltca_cert));
    CHECK(store.validate(pca1_cert));
    CHECK(store.validate(pca2_cert));

    // Cross certification: domain-B LTCA signs a domain-C PCA.
    KeyPair c_pca_key = KeyPair::generate();
    LongTermCertificate c_pca_cert = rca_certify(
        ltca_key, "ltca-b", c_pca_key.public_bytes(), 0, kNow + 1000000);
    store.add_certificate(ltca_cert);
    CHECK(store.validate(c_pca_cert));
}

TEST_CASE("discovery registry") {
    KeyPair rca = KeyPair::generate();
    KeyPair ltca_key = KeyPair::generate();
    DomainDescriptor d;
    d.id = "home";
    d.ltca_id = "ltca-home";
    d.ltca_endpoint = "http://127.0.0.1:9001";
    d.ltca_certificate =
        rca_certify(rca, "rca", ltca_key.public_bytes(), 0, kNow + 1000);
    Registry reg;
    reg.add(d);
    CHECK(reg.discover("home").ok());
    auto miss = reg.discover("elsewhere");
    REQUIRE_FALSE(miss.ok());
    CHECK(miss.error().code == Err::UnknownDomain);
}

TEST_CASE("registry built from config text") {
    KeyPair rca = KeyPair::generate();
    KeyPair ltca_key = KeyPair::generate();
    KeyPair pca_key = KeyPair::generate();
    auto ltca_cert =
        rca_certify(rca, "rca", ltca_key.public_bytes(), 0, kNow + 1000);
    auto pca_cert =
        rca_certify(rca, "rca", pca_key.public_bytes(), 0, kNow + 1000);

    std::string text =
        "domain.home.ltca.id=ltca-home\n"
        "domain.home.ltca.endpoint=http://127.0.0.1:9001\n"
        "domain.home.ltca.certificate=" +
        base64url_encode(ltca_cert.to_bytes()) +
        "\n"
        "domain.home.epoch=0\n"
        "domain.home.pca.1.id=pca-home\n"
        "domain.home.pca.1.endpoint=http://127.0.0.1:9002\n"
        "domain.home.pca.1.certificate=" +
        base64url_encode(pca_cert.to_bytes()) +
        "\n"
        "domain.home.pca.1.tau_p=600\n"
        "domain.home.pca.1.gamma=7200\n";
    auto domains = domains_from_config(parse_config(text));
    REQUIRE(domains.size() == 1);
    const auto& d = domains[0];
    CHECK(d.id == "home");
    CHECK(d.ltca_id == "ltca-home");
    CHECK(d.ltca_certificate.to_bytes() == ltca_cert.to_bytes());
    REQUIRE(d.pcas.size() == 1);
    CHECK(d.pcas[0].id == "pca-home");
    CHECK(d.pcas[0].tau_p == 600);
    CHECK(d.pcas[0].gamma == 7200);
}

TEST_CASE("wire round-trips and canonical stability under key reordering") {
    KeyPair k = KeyPair::generate();
    ltca::TicketRequest req;
    req.id_req = "obu";
    req.target_hash = hash(Bytes{1, 2, 3});
    req.t_s = kNow;
    req.t_e = kNow + 900;
    req.nonce = 9;
    req.t_now = kNow;
    req.ltc.serial = gen_rnd(kSerialLen);
    req.ltc.subject_public_key = k.public_bytes();
    req.ltc.issuer_id = "ltca-a";
    req.ltc.valid_from = 1;
    req.ltc.valid_to = kNow + 1000;
    req.ltc.signature = k.sign(req.ltc.tbs_bytes());
    req.signature = k.sign(req.signed_payload());

    Json wire = to_json(req);
    auto back = ticket_request_from_json(wire);
    CHECK(back.signed_payload() == req.signed_payload());
    CHECK(back.ltc.to_bytes() == req.ltc.to_bytes());
    CHECK(back.signature == req.signature);

    // Same object, JSON keys in a different order: identical canonical
    // payload, so the signature still verifies.
    std::string reordered = "{\"t_now\":" + std::to_string(req.t_now) +
                            ",\"signature\":\"" +
                            base64url_encode(req.signature) +
                            "\",\"nonce\":9,\"t_e\":" +
                            std::to_string(req.t_e) +
                            ",\"t_s\":" + std::to_string(req.t_s) +
                            ",\"ltc\":\"" +
                            base64url_encode(req.ltc.to_bytes()) +
                            "\",\"target_hash\":\"" +
                            base64url_encode(req.target_hash) +
                            "\",\"id_req\":\"obu\"}";
    auto reparsed = ticket_request_from_json(Json::parse(reordered));
    CHECK(reparsed.signed_payload() == req.signed_payload());
    CHECK(verify(k.public_bytes(), reparsed.signed_payload(),
                 reparsed.signature));
}

TEST_CASE("full acquisition and validation over HTTP") {
    KeyPair rca = KeyPair::generate();
    KeyPair ltca_key = KeyPair::generate();
    KeyPair pca_key = KeyPair::generate();
    KeyPair ra_key = KeyPair::generate();
    CaIdentity ltca_id = make_ca("ltca-a", ltca_key, rca);
    CaIdentity pca_id = make_ca("pca-1", pca_key, rca);
    CaIdentity ra_id = make_ca("ra-1", ra_key, rca);

    guard::InMemoryGuard guard;
    store::RecordStore records;
    ltca::Ltca ltca_svc(ltca_id, ltca_key, guard, records,
                        {.now_fn = [] { return kNow; }});
    pca::Pca pca_svc(pca_id, pca_key, guard, records,
                     {.now_fn = [] { return kNow; }});
    pca_svc.add_trusted_ltca(ltca_id);
    pca_svc.add_authorized_ra(ra_id);

    HttpServer ltca_srv;
    ltca_srv.mount_ltca(ltca_svc);
    int ltca_port = ltca_srv.start();
    HttpServer pca_srv;
    pca_srv.mount_pca(pca_svc);
    int pca_port = pca_srv.start();

    ra::Ra ra_svc(ra_id, ra_key, {.now_fn = [] { return kNow; }});
    ra_svc.add_trusted_ltca(ltca_id);
    ra_svc.register_pca(pca_id, [pca_port](const pca::ResolveRequest& rr) {
        HttpClient c("127.0.0.1", pca_port);
        return c.resolve(rr);
    });
    HttpServer ra_srv;
    ra_srv.mount_ra(ra_svc);
    int ra_port = ra_srv.start();

    Registry reg;
    DomainDescriptor dom;
    dom.id = "home";
    dom.ltca_id = "ltca-a";
    dom.ltca_endpoint = "http://127.0.0.1:" + std::to_string(ltca_port);
    dom.ltca_certificate = ltca_id.certificate;
    dom.pcas.push_back({"pca-1",
                        "http://127.0.0.1:" + std::to_string(pca_port),
                        pca_id.certificate, 300, 86400});
    reg.add(dom);
    HttpServer dir_srv;
    dir_srv.mount_discovery(reg);
    int dir_port = dir_srv.start();

    // Unauthenticated discovery.
    HttpClient dir("127.0.0.1", dir_port);
    auto found = dir.discover("home");
    REQUIRE(found.ok());
    CHECK(found.value().pcas[0].id == "pca-1");
    auto missing = dir.discover("nowhere");
    REQUIRE_FALSE(missing.ok());
    CHECK(missing.error().code == Err::UnknownDomain);

    // Registration and the ticket leg.
    HttpClient ltca_cli("127.0.0.1", ltca_port);
    KeyPair vkey = KeyPair::generate();
    auto reg_out = ltca_cli.register_vehicle(vkey.public_bytes(), kNow - 10,
                                             kNow + 365 * 86400);
    REQUIRE(reg_out.ok());

    vehicle::Client obu(KeyPair::from_private(vkey.private_bytes()),
                        reg_out.value(), {.now_fn = [] { return kNow; }});
    auto [treq, rnd_tkt] = obu.build_ticket_request("pca-1", kNow,
                                                    kNow + 1500);
    auto tresp = ltca_cli.issue_ticket(treq);
    REQUIRE(tresp.ok());

    // The pseudonym leg through the vehicle client over HTTP.
    HttpClient pca_cli("127.0.0.1", pca_port);
    vehicle::CaEndpoint pca_ep{"pca-1", pca_key.public_bytes(), 300};
    auto batch = obu.acquire_pseudonyms(
        pca_ep, tresp.value(), rnd_tkt, 3,
        [&](const pca::PseudonymRequest& r) {
            return pca_cli.issue_pseudonyms(r);
        });
    REQUIRE(batch.ok());
    CHECK(batch.value().size() == 3);

    // Denials map back to typed errors across the wire.
    auto [treq2, rnd2] = obu.build_ticket_request("pca-1", kNow + 100,
                                                  kNow + 1200);
    auto denied = ltca_cli.issue_ticket(treq2);
    REQUIRE_FALSE(denied.ok());
    CHECK(denied.error().code == Err::SybilDenied);

    // Validation through the RA endpoint.
    const auto& entry = batch.value()[1];
    KeyPair reporter_key = KeyPair::generate();
    Pseudonym reporter;
    reporter.serial = hash(gen_rnd());
    reporter.public_key = reporter_key.public_bytes();
    reporter.ik_p = hash(gen_rnd());
    reporter.t_s = kNow - 10;
    reporter.t_e = kNow + 290;
    reporter.issuer_id = "pca-1";
    reporter.signature = pca_key.sign(reporter.tbs_bytes());

    ra::ReportEnvelope env;
    env.suspicious_pseudonym = entry.pseudonym.to_bytes();
    env.reporter_pseudonym = reporter.to_bytes();
    env.signature = reporter_key.sign(env.signed_payload());

    HttpClient ra_cli("127.0.0.1", ra_port);
    auto verdict = ra_cli.validate(env);
    REQUIRE(verdict.ok());
    CHECK(verdict.value().verdict == ra::Verdict::ValidIssuance);

    // Metrics and health.
    auto m = ltca_cli.metrics();
    REQUIRE(m.ok());
    CHECK(m.value().healthy);
    CHECK(m.value().load >= 0.0);
    CHECK(m.value().load <= 1.0);
    auto h = pca_cli.healthy();
    REQUIRE(h.ok());
    CHECK(h.value());

    ra_srv.stop();
    dir_srv.stop();
    pca_srv.stop();
    ltca_srv.stop();
}
