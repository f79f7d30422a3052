#include "vpki/vehicle/client.hpp"

#include <chrono>

#include "vpki/core/chain.hpp"
#include "vpki/core/encoding.hpp"

namespace vpki::vehicle {

namespace {

uint64_t system_now() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

uint64_t random_nonce() {
    Bytes b = gen_rnd(8);
    return get_u64be(b, 0);
}

}  // namespace

Client::Client(KeyPair key, LongTermCertificate ltc, ClientConfig config)
    : key_(std::move(key)), ltc_(std::move(ltc)), config_(std::move(config)) {}

uint64_t Client::now() const {
    return config_.now_fn ? config_.now_fn() : system_now();
}

std::pair<ltca::TicketRequest, Bytes> Client::build_ticket_request(
    const std::string& target_ca_id, uint64_t t_s, uint64_t t_e) {
    Bytes rnd_tkt = gen_rnd();
    ltca::TicketRequest req;
    req.id_req = "obu";
    req.target_hash = hash_fields({to_bytes(target_ca_id), rnd_tkt});
    req.t_s = t_s;
    req.t_e = t_e;
    req.nonce = random_nonce();
    req.t_now = now();
    req.ltc = ltc_;
    req.signature = key_.sign(req.signed_payload());
    return {std::move(req), std::move(rnd_tkt)};
}

Outcome<std::vector<PoolEntry>> Client::acquire_pseudonyms(
    const CaEndpoint& pca, const ltca::TicketResponse& ticket,
    const Bytes& rnd_tkt, size_t n, const PseudonymFn& send) {
    std::vector<KeyPair> keys;
    pca::PseudonymRequest req;
    req.id_req = "obu";
    req.rnd_n_tkt = rnd_tkt;
    req.ticket_bytes = ticket.ticket.to_bytes();
    keys.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        KeyPair k = KeyPair::generate();
        pca::Csr csr;
        csr.public_key = k.public_bytes();
        csr.signature = k.sign(csr.signed_payload());
        req.csrs.push_back(std::move(csr));
        keys.push_back(std::move(k));
    }
    req.nonce = random_nonce();
    req.t_now = now();

    auto out = send(req);
    if (!out.ok()) return out.error();
    const pca::PseudonymResponse& resp = out.value();

    if (resp.pseudonyms.size() != n || resp.rnd_v.size() != 32 ||
        resp.nonce != req.nonce + 1) {
        return Error{Err::ProviderMisbehavior, "malformed response envelope"};
    }
    std::vector<Bytes> pubkeys;
    std::vector<chain::Slot> slots;
    for (size_t i = 0; i < n; ++i) {
        const Pseudonym& p = resp.pseudonyms[i];
        if (p.public_key != keys[i].public_bytes()) {
            return Error{Err::ProviderMisbehavior, "substituted key"};
        }
        if (!verify(pca.public_key, p.tbs_bytes(), p.signature)) {
            return Error{Err::ProviderMisbehavior, "bad pseudonym signature"};
        }
        if (p.t_s % pca.tau_p != 0 || p.t_e != p.t_s + pca.tau_p ||
            p.t_s < ticket.ticket.t_s || p.t_e > ticket.ticket.t_e) {
            return Error{Err::ProviderMisbehavior, "slot misaligned"};
        }
        if (i > 0 && p.t_s != resp.pseudonyms[i - 1].t_e) {
            return Error{Err::ProviderMisbehavior,
                         "slots overlap or leave gaps"};
        }
        pubkeys.push_back(p.public_key);
        slots.push_back({p.t_s, p.t_e});
    }
    auto links =
        chain::compute(ticket.ticket.ik_tkt, pubkeys, slots, resp.rnd_v);
    for (size_t i = 0; i < n; ++i) {
        if (links[i].ik_p != resp.pseudonyms[i].ik_p ||
            links[i].serial != resp.pseudonyms[i].serial) {
            return Error{Err::ProviderMisbehavior, "chain mismatch"};
        }
    }

    std::vector<PoolEntry> batch;
    batch.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        batch.push_back({resp.pseudonyms[i], keys[i].private_bytes()});
        pool_.push_back(batch.back());
    }
    return batch;
}

Outcome<std::vector<PoolEntry>> Client::acquire_foreign(
    const CaEndpoint& home_ltca, const TicketFn& home_send,
    const CaEndpoint& foreign_ltca, const ForeignTicketFn& foreign_send,
    const CaEndpoint& foreign_pca, const PseudonymFn& pca_send, uint64_t t_s,
    uint64_t t_e, size_t n) {
    // Home leg, identical in shape to a native ticket request; the target
    // is the foreign issuer instead of a PCA.
    auto [f_req, rnd_f] = build_ticket_request(foreign_ltca.id, t_s, t_e);
    auto f_out = home_send(f_req);
    if (!f_out.ok()) return f_out.error();
    const ltca::TicketResponse& f_resp = f_out.value();
    if (!verify(home_ltca.public_key, f_resp.ticket.tbs_bytes(),
                f_resp.ticket.signature)) {
        return Error{Err::ProviderMisbehavior, "bad bearer ticket signature"};
    }

    // Foreign issuer leg: bearer ticket in, native-shaped ticket out. The
    // new target again hides the PCA identity behind a fresh random.
    Bytes rnd_n = gen_rnd();
    ltca::ForeignTicketRequest n_req;
    n_req.id_req = "obu";
    n_req.home_issuer_id = home_ltca.id;
    n_req.presented_ticket = f_resp.ticket.to_bytes();
    n_req.rnd_presented = rnd_f;
    n_req.target_hash = hash_fields({to_bytes(foreign_pca.id), rnd_n});
    n_req.t_s = t_s;
    n_req.t_e = t_e;
    n_req.nonce = random_nonce();
    n_req.t_now = now();
    auto n_out = foreign_send(n_req);
    if (!n_out.ok()) return n_out.error();
    const ltca::TicketResponse& n_resp = n_out.value();
    if (!verify(foreign_ltca.public_key, n_resp.ticket.tbs_bytes(),
                n_resp.ticket.signature)) {
        return Error{Err::ProviderMisbehavior, "bad ticket signature"};
    }
    return acquire_pseudonyms(foreign_pca, n_resp, rnd_n, n, pca_send);
}

bool Client::refill_needed(const std::vector<PoolEntry>& pool, uint64_t now,
                           uint64_t trip_remaining_s, uint64_t tau_p) {
    uint64_t horizon = now;
    for (const PoolEntry& e : pool) {
        if (e.pseudonym.t_e > horizon) horizon = e.pseudonym.t_e;
    }
    uint64_t coverage = horizon - now;
    uint64_t threshold = std::max(trip_remaining_s, 2 * tau_p);
    return coverage < threshold;
}

}  // namespace vpki::vehicle
