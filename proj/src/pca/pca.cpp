#include "vpki/pca/pca.hpp"

#include <chrono>

#include "vpki/core/encoding.hpp"

namespace vpki::pca {

namespace {

uint64_t system_now() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

}  // namespace

uint64_t align_up(uint64_t t, uint64_t tau) {
    return ((t + tau - 1) / tau) * tau;
}

Bytes Csr::signed_payload() const { return canonical_encode({public_key}); }

Bytes ResolveRequest::signed_payload() const {
    return canonical_encode({serial});
}

Bytes Resolution::signed_payload() const {
    return canonical_encode({serial, ticket_bytes, rnd_ik_p});
}

Pca::Pca(CaIdentity identity, KeyPair key, guard::SybilGuard& guard,
         store::RecordStore& records, PcaConfig config)
    : identity_(std::move(identity)),
      key_(std::move(key)),
      guard_(guard),
      records_(records),
      config_(std::move(config)) {}

uint64_t Pca::now() const {
    return config_.now_fn ? config_.now_fn() : system_now();
}

void Pca::add_trusted_ltca(const CaIdentity& ltca) {
    ltcas_.add_anchor(ltca.certificate);
}

void Pca::add_authorized_ra(const CaIdentity& ra) {
    ras_.push_back(ra.certificate);
}

Outcome<PseudonymResponse> Pca::issue_pseudonyms(const PseudonymRequest& req) {
    uint64_t t = now();
    uint64_t skew = t > req.t_now ? t - req.t_now : req.t_now - t;
    if (skew > config_.freshness_window_s) {
        return Error{Err::StaleTimestamp, "request timestamp outside window"};
    }
    size_t n = req.csrs.size();
    if (n == 0) return Error{Err::BadRequest, "empty batch"};
    if (n > config_.max_batch) {
        return Error{Err::BatchTooLarge, "batch exceeds configured maximum"};
    }
    Ticket tkt;
    try {
        tkt = Ticket::from_bytes(req.ticket_bytes);
    } catch (const std::exception&) {
        return Error{Err::BadRequest, "unparseable ticket"};
    }
    if (!ltcas_.find_verifier(tkt.tbs_bytes(), tkt.signature)) {
        return Error{Err::UntrustedLtca, "ticket issuer not trusted"};
    }
    if (req.rnd_n_tkt.size() != 32 ||
        hash_fields({to_bytes(identity_.id), req.rnd_n_tkt}) !=
            tkt.target_hash) {
        return Error{Err::TargetMismatch, "ticket bound to another CA"};
    }
    if (t > tkt.exp_tkt) return Error{Err::ExpiredTicket, "ticket expired"};

    uint64_t tau = config_.tau_p_s;
    uint64_t start = align_up(tkt.t_s, tau);
    if (start + n * tau > tkt.t_e) {
        return Error{Err::WindowMisaligned,
                     "aligned slots do not fit the ticket window"};
    }
    std::vector<chain::Slot> slots;
    slots.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        slots.push_back({start + i * tau, start + (i + 1) * tau});
    }

    bool flagged = false;
    bool granted = false;
    try {
        if (guard_.claim_ticket_once(tkt.serial) != guard::Claim::Granted) {
            return Error{Err::TicketReused, "ticket already spent"};
        }
        granted = true;
    } catch (const GuardUnavailableError&) {
        if (!config_.fail_open) {
            return Error{Err::GuardUnavailable, "guard down, failing closed"};
        }
        flagged = true;
    }
    auto revert = [&] {
        if (granted) guard_.revert_ticket_once(tkt.serial);
    };

    try {
        std::vector<Bytes> keys;
        keys.reserve(n);
        for (const Csr& csr : req.csrs) {
            if (csr.public_key.size() != kPublicKeyLen ||
                csr.public_key[0] != 0x04 ||
                !verify(csr.public_key, csr.signed_payload(), csr.signature)) {
                revert();
                return Error{Err::BadCsr, "proof of possession failed"};
            }
            keys.push_back(csr.public_key);
        }

        if (hooks_.fail_after_guard) {
            revert();
            return Error{Err::InjectedFailure, "test hook"};
        }

        Bytes rnd_v = gen_rnd();
        std::vector<chain::Link> links =
            chain::compute(tkt.ik_tkt, keys, slots, rnd_v);

        PseudonymResponse resp;
        resp.id_res = identity_.id;
        resp.pseudonyms.reserve(n);
        std::vector<Digest> serials;
        serials.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            Pseudonym p;
            p.serial = links[i].serial;
            p.public_key = keys[i];
            p.ik_p = links[i].ik_p;
            p.t_s = slots[i].t_s;
            p.t_e = slots[i].t_e;
            p.issuer_id = identity_.id;
            p.signature = key_.sign(p.tbs_bytes());
            serials.push_back(p.serial);
            resp.pseudonyms.push_back(std::move(p));
        }

        store::PseudonymBatchRecord rec;
        rec.sn_tkt = tkt.serial;
        rec.rnd_v = rnd_v;
        rec.serials = std::move(serials);
        rec.ticket_bytes = req.ticket_bytes;
        rec.issued_at = t;
        rec.fail_open_flagged = flagged;
        records_.append_batch_record(std::move(rec));

        resp.rnd_v = std::move(rnd_v);
        resp.nonce = req.nonce + 1;
        resp.t_now = now();
        return resp;
    } catch (const store::RecordStore::Backpressure&) {
        revert();
        return Error{Err::StoreBackpressure, "record queue full"};
    } catch (const CryptoError& e) {
        revert();
        return Error{Err::BadRequest,
                     std::string("crypto failure: ") + e.what()};
    }
}

Outcome<Resolution> Pca::resolve_pseudonym(const ResolveRequest& req) {
    bool authorized = false;
    for (const auto& ra : ras_) {
        if (verify(ra.subject_public_key, req.signed_payload(),
                   req.signature)) {
            authorized = true;
            break;
        }
    }
    if (!authorized) {
        return Error{Err::UnauthorizedCaller, "not an authorized resolver"};
    }
    auto hit = records_.lookup_by_pseudonym_serial(req.serial);
    if (!hit) return Error{Err::NotFound, "unknown pseudonym serial"};

    Resolution res;
    res.serial = req.serial;
    res.ticket_bytes = hit->record.ticket_bytes;
    res.rnd_ik_p = iterated_hash(hit->record.rnd_v, hit->index);
    res.signature = key_.sign(res.signed_payload());
    return res;
}

Health Pca::health_selfcheck() {
    Bytes probe = to_bytes("health probe");
    try {
        Bytes sig = key_.sign(probe);
        if (!verify(identity_.certificate.subject_public_key, probe, sig)) {
            return {false, "sign"};
        }
    } catch (const CryptoError&) {
        return {false, "sign"};
    }

    if (!config_.fail_open) {
        Bytes reserved = to_bytes("__health__" + identity_.id);
        try {
            if (guard_.claim_ticket_once(reserved) == guard::Claim::Granted) {
                guard_.revert_ticket_once(reserved);
            }
        } catch (const GuardUnavailableError&) {
            return {false, "guard"};
        }
    }

    // Dummy issuance: a ticket from a throwaway issuer key trusted only
    // inside this check, batched into two pseudonyms, chain recomputed
    // independently. Nothing is persisted or emitted.
    try {
        KeyPair dummy_ltca = KeyPair::generate();
        Bytes rnd = gen_rnd();
        Ticket tkt;
        tkt.serial = gen_rnd(kSerialLen);
        tkt.target_hash = hash_fields({to_bytes(identity_.id), rnd});
        uint64_t tau = config_.tau_p_s;
        tkt.t_s = align_up(now(), tau);
        tkt.t_e = tkt.t_s + 2 * tau;
        tkt.exp_tkt = tkt.t_e;
        tkt.ik_tkt = hash(gen_rnd());
        tkt.signature = dummy_ltca.sign(tkt.tbs_bytes());
        if (!tkt.verify_under(dummy_ltca.public_bytes())) {
            return {false, "issue"};
        }

        std::vector<Bytes> keys;
        std::vector<chain::Slot> slots;
        for (size_t i = 0; i < 2; ++i) {
            keys.push_back(KeyPair::generate().public_bytes());
            slots.push_back({tkt.t_s + i * tau, tkt.t_s + (i + 1) * tau});
        }
        Bytes rnd_v = gen_rnd();
        auto links = chain::compute(tkt.ik_tkt, keys, slots, rnd_v);
        Digest ik_tkt = tkt.ik_tkt;
        if (hooks_.break_chain) ik_tkt[0] ^= 0x01;
        for (size_t i = 0; i < links.size(); ++i) {
            Digest rnd_ik = iterated_hash(rnd_v, i + 1);
            Digest expect =
                chain::identifiable_key(ik_tkt, keys[i], slots[i], rnd_ik);
            if (expect != links[i].ik_p) return {false, "chain"};
        }
        Digest sn = hash_fields({links[0].ik_p, links[0].rnd_ik});
        if (sn != links[0].serial) return {false, "chain"};
    } catch (const std::exception&) {
        return {false, "issue"};
    }
    return {true, ""};
}

}  // namespace vpki::pca
