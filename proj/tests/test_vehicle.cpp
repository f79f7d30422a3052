#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vpki/core/encoding.hpp"
#include "vpki/vehicle/client.hpp"

using namespace vpki;
using namespace vpki::vehicle;

namespace {

constexpr uint64_t kNow = 1700000000;

CaIdentity make_ca(const std::string& id, const KeyPair& key,
                   const KeyPair& rca) {
    CaIdentity ca;
    ca.id = id;
    ca.certificate.serial = gen_rnd(kSerialLen);
    ca.certificate.subject_public_key = key.public_bytes();
    ca.certificate.issuer_id = "rca";
    ca.certificate.valid_from = 0;
    ca.certificate.valid_to = kNow + 10 * 365 * 86400;
    ca.certificate.signature = rca.sign(ca.certificate.tbs_bytes());
    return ca;
}

struct Domain {
    KeyPair rca_key;
    KeyPair ltca_key = KeyPair::generate();
    KeyPair pca_key = KeyPair::generate();
    CaIdentity ltca_id, pca_id;
    guard::InMemoryGuard guard;
    store::RecordStore records;
    ltca::Ltca ltca;
    pca::Pca pca;

    explicit Domain(const std::string& name, KeyPair rca)
        : rca_key(std::move(rca)),
          ltca_id(make_ca("ltca-" + name, ltca_key, rca_key)),
          pca_id(make_ca("pca-" + name, pca_key, rca_key)),
          ltca(ltca_id, ltca_key, guard, records,
               {.now_fn = [] { return kNow; }}),
          pca(pca_id, pca_key, guard, records,
              {.now_fn = [] { return kNow; }}) {
        pca.add_trusted_ltca(ltca_id);
    }

    CaEndpoint ltca_endpoint() const {
        return {ltca_id.id, ltca_key.public_bytes(), 0};
    }
    CaEndpoint pca_endpoint() const {
        return {pca_id.id, pca_key.public_bytes(), 300};
    }
};

struct Fixture {
    Domain home{"home", KeyPair::generate()};
    KeyPair vkey = KeyPair::generate();
    Client client;

    Fixture() : client(make_client()) {}

    Client make_client() {
        auto reg = home.ltca.register_vehicle(vkey.public_bytes(), kNow - 10,
                                              kNow + 365 * 86400);
        REQUIRE(reg.ok());
        return Client(KeyPair::from_private(vkey.private_bytes()),
                      reg.value(), {.now_fn = [] { return kNow; }});
    }

    // Runs the ticket leg against the in-process issuer.
    std::pair<ltca::TicketResponse, Bytes> get_ticket(uint64_t t_s,
                                                      uint64_t t_e) {
        auto [req, rnd] = client.build_ticket_request(home.pca_id.id, t_s,
                                                      t_e);
        auto out = home.ltca.issue_ticket(req);
        REQUIRE(out.ok());
        return {out.value(), rnd};
    }

    PseudonymFn pca_send() {
        return [this](const pca::PseudonymRequest& r) {
            return home.pca.issue_pseudonyms(r);
        };
    }
};

}  // namespace

TEST_CASE("ticket request hides the target and recomputes") {
    Fixture f;
    auto [req, rnd] = f.client.build_ticket_request("pca-home", kNow,
                                                    kNow + 900);
    // Straight-line recomputation of the published construction.
    Digest expect = hash(canonical_encode({to_bytes("pca-home"), rnd}));
    CHECK(req.target_hash == expect);
    CHECK(verify(f.vkey.public_bytes(), req.signed_payload(), req.signature));

    auto [req2, rnd2] = f.client.build_ticket_request("pca-home", kNow,
                                                      kNow + 900);
    CHECK(req.target_hash != req2.target_hash);

    Bytes wire = canonical_encode(
        {to_bytes(req.id_req), req.target_hash, u64be(req.t_s),
         u64be(req.t_e), u64be(req.nonce), u64be(req.t_now),
         req.ltc.to_bytes(), req.signature});
    CHECK_FALSE(contains_bytes(wire, to_bytes("pca-home")));
}

TEST_CASE("honest issuance is accepted and pooled") {
    Fixture f;
    auto [tresp, rnd] = f.get_ticket(kNow, kNow + 1500);
    auto out = f.client.acquire_pseudonyms(f.home.pca_endpoint(), tresp, rnd,
                                           4, f.pca_send());
    REQUIRE(out.ok());
    CHECK(out.value().size() == 4);
    CHECK(f.client.pool().size() == 4);
    // At most one pseudonym valid at any instant.
    const auto& pool = f.client.pool();
    for (size_t i = 0; i < pool.size(); ++i) {
        for (size_t j = i + 1; j < pool.size(); ++j) {
            bool disjoint = pool[i].pseudonym.t_e <= pool[j].pseudonym.t_s ||
                            pool[j].pseudonym.t_e <= pool[i].pseudonym.t_s;
            CHECK(disjoint);
        }
    }
}

TEST_CASE("tampered responses are rejected as provider misbehavior") {
    Fixture f;
    auto [tresp, rnd] = f.get_ticket(kNow, kNow + 1500);
    auto tampered = [&](auto mutate) {
        return [&, mutate](const pca::PseudonymRequest& r)
                   -> Outcome<pca::PseudonymResponse> {
            auto out = f.home.pca.issue_pseudonyms(r);
            if (!out.ok()) return out;
            pca::PseudonymResponse resp = out.value();
            mutate(resp);
            return resp;
        };
    };
    auto expect_rejected = [&](const PseudonymFn& send) {
        auto out = f.client.acquire_pseudonyms(f.home.pca_endpoint(), tresp,
                                               rnd, 3, send);
        REQUIRE_FALSE(out.ok());
        CHECK(out.error().code == Err::ProviderMisbehavior);
        CHECK(f.client.pool().empty());
    };

    SUBCASE("overlapping slots, re-signed") {
        expect_rejected(tampered([&](pca::PseudonymResponse& r) {
            r.pseudonyms[1].t_s = r.pseudonyms[0].t_s;
            r.pseudonyms[1].t_e = r.pseudonyms[0].t_e;
            r.pseudonyms[1].signature =
                f.home.pca_key.sign(r.pseudonyms[1].tbs_bytes());
        }));
    }
    SUBCASE("broken chain: one serial byte flipped, re-signed") {
        expect_rejected(tampered([&](pca::PseudonymResponse& r) {
            r.pseudonyms[2].serial[0] ^= 0x01;
            r.pseudonyms[2].signature =
                f.home.pca_key.sign(r.pseudonyms[2].tbs_bytes());
        }));
    }
    SUBCASE("bad signature") {
        expect_rejected(tampered([&](pca::PseudonymResponse& r) {
            r.pseudonyms[0].signature[8] ^= 0x01;
        }));
    }
    SUBCASE("substituted public key") {
        expect_rejected(tampered([&](pca::PseudonymResponse& r) {
            r.pseudonyms[0].public_key = KeyPair::generate().public_bytes();
            r.pseudonyms[0].signature =
                f.home.pca_key.sign(r.pseudonyms[0].tbs_bytes());
        }));
    }
    SUBCASE("wrong rnd_v") {
        expect_rejected(tampered(
            [&](pca::PseudonymResponse& r) { r.rnd_v = gen_rnd(); }));
    }
}

TEST_CASE("pseudonym leg carries no client credential") {
    Fixture f;
    auto [tresp, rnd] = f.get_ticket(kNow, kNow + 900);
    Bytes seen;
    PseudonymFn capture = [&](const pca::PseudonymRequest& r) {
        seen = canonical_encode({to_bytes(r.id_req), r.rnd_n_tkt,
                                 r.ticket_bytes, u64be(r.nonce),
                                 u64be(r.t_now)});
        for (const auto& c : r.csrs) {
            Bytes b = canonical_encode({c.public_key, c.signature});
            seen.insert(seen.end(), b.begin(), b.end());
        }
        return f.home.pca.issue_pseudonyms(r);
    };
    REQUIRE(f.client
                .acquire_pseudonyms(f.home.pca_endpoint(), tresp, rnd, 2,
                                    capture)
                .ok());
    CHECK_FALSE(contains_bytes(seen, f.client.ltc().serial));
    CHECK_FALSE(contains_bytes(seen, f.client.ltc().subject_public_key));
    CHECK_FALSE(contains_bytes(seen, f.vkey.private_bytes()));
}

TEST_CASE("refill trigger") {
    std::vector<PoolEntry> pool;
    CHECK(Client::refill_needed(pool, kNow, 0, 300));  // empty pool

    PoolEntry e;
    e.pseudonym.t_s = kNow;
    e.pseudonym.t_e = kNow + 7200;  // 2 h coverage
    pool.push_back(e);
    CHECK_FALSE(Client::refill_needed(pool, kNow, 3600, 300));  // 1 h trip

    pool[0].pseudonym.t_e = kNow + 600;  // 10 min coverage
    CHECK(Client::refill_needed(pool, kNow, 0, 450));  // 15 min low-water
}

TEST_CASE("foreign domain acquisition") {
    KeyPair shared_rca = KeyPair::generate();
    Domain home("home", KeyPair::from_private(shared_rca.private_bytes()));
    Domain away("away", KeyPair::from_private(shared_rca.private_bytes()));
    away.ltca.add_trusted_peer(home.ltca_id);
    away.pca.add_trusted_ltca(away.ltca_id);

    KeyPair vkey = KeyPair::generate();
    auto reg = home.ltca.register_vehicle(vkey.public_bytes(), kNow - 10,
                                          kNow + 365 * 86400);
    REQUIRE(reg.ok());
    Client client(KeyPair::from_private(vkey.private_bytes()), reg.value(),
                  {.now_fn = [] { return kNow; }});

    ltca::TicketRequest home_seen;
    Bytes pca_seen;
    TicketFn home_send = [&](const ltca::TicketRequest& r) {
        home_seen = r;
        return home.ltca.issue_ticket(r);
    };
    ForeignTicketFn away_send = [&](const ltca::ForeignTicketRequest& r) {
        return away.ltca.issue_foreign_ticket(r);
    };
    PseudonymFn away_pca_send = [&](const pca::PseudonymRequest& r) {
        pca_seen = canonical_encode({to_bytes(r.id_req), r.rnd_n_tkt,
                                     r.ticket_bytes, u64be(r.nonce)});
        return away.pca.issue_pseudonyms(r);
    };

    auto out = client.acquire_foreign(
        home.ltca_endpoint(), home_send, away.ltca_endpoint(), away_send,
        away.pca_endpoint(), away_pca_send, kNow, kNow + 1500, 3);
    REQUIRE(out.ok());
    CHECK(out.value().size() == 3);
    for (const auto& e : out.value()) {
        CHECK(e.pseudonym.issuer_id == "pca-away");
        CHECK(verify(away.pca_key.public_bytes(), e.pseudonym.tbs_bytes(),
                     e.pseudonym.signature));
    }

    // The home issuer saw a request indistinguishable from a native one:
    // an LTC-backed envelope whose target is an opaque hash.
    CHECK(home_seen.ltc.serial == client.ltc().serial);
    Bytes home_wire = canonical_encode(
        {to_bytes(home_seen.id_req), home_seen.target_hash,
         u64be(home_seen.t_s), u64be(home_seen.t_e), home_seen.signature});
    CHECK_FALSE(contains_bytes(home_wire, to_bytes("ltca-away")));
    CHECK_FALSE(contains_bytes(home_wire, to_bytes("pca-away")));

    // The foreign provisioning leg names no home-domain entity.
    CHECK_FALSE(contains_bytes(pca_seen, to_bytes("ltca-home")));
    CHECK_FALSE(contains_bytes(pca_seen, client.ltc().serial));
    CHECK_FALSE(contains_bytes(pca_seen, client.ltc().subject_public_key));
}
