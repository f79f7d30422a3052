#include "vpki/ltca/ltca.hpp"

#include <chrono>

#include "vpki/core/encoding.hpp"

namespace vpki::ltca {

namespace {

uint64_t system_now() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

bool well_formed_point(const Bytes& pk) {
    return pk.size() == kPublicKeyLen && pk[0] == 0x04;
}

}  // namespace

Bytes TicketRequest::signed_payload() const {
    return canonical_encode(
        {to_bytes(id_req), target_hash, u64be(t_s), u64be(t_e)});
}

Ltca::Ltca(CaIdentity identity, KeyPair key, guard::SybilGuard& guard,
           store::RecordStore& records, LtcaConfig config)
    : identity_(std::move(identity)),
      key_(std::move(key)),
      guard_(guard),
      records_(records),
      config_(std::move(config)) {}

uint64_t Ltca::now() const {
    return config_.now_fn ? config_.now_fn() : system_now();
}

void Ltca::add_trusted_peer(const CaIdentity& peer) {
    peers_.add_anchor(peer.certificate);
}

void Ltca::deny(const Bytes& sn_ltc) {
    std::lock_guard lock(mu_);
    denied_.insert(sn_ltc);
}

Outcome<LongTermCertificate> Ltca::register_vehicle(const Bytes& public_key,
                                                    uint64_t valid_from,
                                                    uint64_t valid_to) {
    if (!well_formed_point(public_key) || valid_from >= valid_to) {
        return Error{Err::BadRequest, "malformed key or validity window"};
    }
    LongTermCertificate ltc;
    ltc.serial = gen_rnd(kSerialLen);
    ltc.subject_public_key = public_key;
    ltc.issuer_id = identity_.id;
    ltc.valid_from = valid_from;
    ltc.valid_to = valid_to;
    ltc.signature = key_.sign(ltc.tbs_bytes());
    {
        std::lock_guard lock(mu_);
        if (registered_.count(public_key)) {
            return Error{Err::DuplicateRegistration,
                         "public key already registered"};
        }
        registered_.emplace(public_key, ltc.serial);
        by_serial_.emplace(ltc.serial, ltc);
    }
    return ltc;
}

Outcome<std::monostate> Ltca::adopt_registration(
    const LongTermCertificate& ltc) {
    if (ltc.issuer_id != identity_.id ||
        !verify(key_.public_bytes(), ltc.tbs_bytes(), ltc.signature)) {
        return Error{Err::BadRequest, "certificate not issued by this service"};
    }
    std::lock_guard lock(mu_);
    registered_.emplace(ltc.subject_public_key, ltc.serial);
    by_serial_.emplace(ltc.serial, ltc);
    return std::monostate{};
}

Outcome<TicketResponse> Ltca::issue_ticket(const TicketRequest& req) {
    uint64_t t = now();
    uint64_t skew = t > req.t_now ? t - req.t_now : req.t_now - t;
    if (skew > config_.freshness_window_s) {
        return Error{Err::StaleTimestamp, "request timestamp outside window"};
    }
    if (req.t_s >= req.t_e || req.t_e - req.t_s > config_.max_coverage_s) {
        return Error{Err::BadRequest, "bad coverage window"};
    }
    {
        std::lock_guard lock(mu_);
        auto it = by_serial_.find(req.ltc.serial);
        if (it == by_serial_.end() || it->second.to_bytes() != req.ltc.to_bytes()) {
            return Error{Err::UnknownOrExpiredLtc, "LTC not registered here"};
        }
        if (denied_.count(req.ltc.serial)) {
            return Error{Err::UnknownOrExpiredLtc, "LTC revoked"};
        }
    }
    if (!req.ltc.verify_under(identity_.certificate.subject_public_key) ||
        !req.ltc.within_window(t)) {
        return Error{Err::UnknownOrExpiredLtc, "LTC invalid"};
    }
    if (!verify(req.ltc.subject_public_key, req.signed_payload(),
                req.signature)) {
        return Error{Err::BadSignature, "request signature"};
    }

    uint64_t exp = req.t_e + config_.ticket_grace_s;
    bool flagged = false;
    bool granted = false;
    std::optional<uint64_t> prev;
    try {
        auto claim = guard_.claim_ticket_interval(req.ltc.serial, req.t_s, exp);
        if (!claim.granted()) {
            return Error{Err::SybilDenied, "overlapping ticket interval"};
        }
        granted = true;
        prev = claim.prev;
    } catch (const GuardUnavailableError&) {
        if (!config_.fail_open) {
            return Error{Err::GuardUnavailable, "guard down, failing closed"};
        }
        flagged = true;
    }
    return build_ticket(req.ltc.to_bytes(), req.target_hash, req.t_s, req.t_e,
                        req.nonce, req.ltc.serial, flagged, granted, prev);
}

Outcome<TicketResponse> Ltca::issue_foreign_ticket(
    const ForeignTicketRequest& req) {
    uint64_t t = now();
    uint64_t skew = t > req.t_now ? t - req.t_now : req.t_now - t;
    if (skew > config_.freshness_window_s) {
        return Error{Err::StaleTimestamp, "request timestamp outside window"};
    }
    if (req.t_s >= req.t_e || req.t_e - req.t_s > config_.max_coverage_s) {
        return Error{Err::BadRequest, "bad coverage window"};
    }
    Ticket presented;
    try {
        presented = Ticket::from_bytes(req.presented_ticket);
    } catch (const std::exception&) {
        return Error{Err::BadRequest, "unparseable bearer ticket"};
    }
    auto issuer = peers_.find_verifier(presented.tbs_bytes(),
                                       presented.signature);
    if (!issuer) {
        return Error{Err::UntrustedIssuer, "bearer ticket issuer unknown"};
    }
    if (hash_fields({to_bytes(identity_.id), req.rnd_presented}) !=
        presented.target_hash) {
        return Error{Err::TargetMismatch, "bearer ticket names another CA"};
    }
    if (t > presented.exp_tkt) {
        return Error{Err::ExpiredTicket, "bearer ticket expired"};
    }
    if (req.t_s < presented.t_s || req.t_e > presented.t_e) {
        return Error{Err::BadRequest,
                     "requested window outside bearer ticket window"};
    }

    bool flagged = false;
    bool granted = false;
    try {
        if (guard_.claim_ticket_once(presented.serial) !=
            guard::Claim::Granted) {
            return Error{Err::ReusedForeignTicket, "bearer ticket spent"};
        }
        granted = true;
    } catch (const GuardUnavailableError&) {
        if (!config_.fail_open) {
            return Error{Err::GuardUnavailable, "guard down, failing closed"};
        }
        flagged = true;
    }
    auto out = build_ticket(req.presented_ticket, req.target_hash, req.t_s,
                            req.t_e, req.nonce, presented.serial, flagged,
                            false, std::nullopt);
    if (!out.ok() && granted) guard_.revert_ticket_once(presented.serial);
    return out;
}

Outcome<TicketResponse> Ltca::build_ticket(
    const Bytes& credential_bytes, const Digest& target_hash, uint64_t t_s,
    uint64_t t_e, uint64_t nonce, const Bytes& sn_cred, bool fail_open_flagged,
    bool guard_granted, std::optional<uint64_t> guard_prev) {
    auto revert = [&] {
        if (guard_granted) guard_.revert_ticket_interval(sn_cred, guard_prev);
    };
    try {
        Ticket tkt;
        tkt.serial = gen_rnd(kSerialLen);
        tkt.target_hash = target_hash;
        tkt.t_s = t_s;
        tkt.t_e = t_e;
        tkt.exp_tkt = t_e + config_.ticket_grace_s;
        Bytes rnd_ik = gen_rnd();
        tkt.ik_tkt = hash_fields(
            {credential_bytes, u64be(t_s), u64be(t_e), rnd_ik});
        tkt.signature = key_.sign(tkt.tbs_bytes());

        if (hooks_.fail_after_guard) {
            revert();
            return Error{Err::InjectedFailure, "test hook"};
        }

        store::TicketRecord rec;
        rec.sn_tkt = tkt.serial;
        rec.sn_ltc = sn_cred;
        rec.ik_tkt = tkt.ik_tkt;
        rec.rnd_ik_tkt = rnd_ik;
        rec.t_s = t_s;
        rec.t_e = t_e;
        rec.exp_tkt = tkt.exp_tkt;
        rec.issued_at = now();
        rec.fail_open_flagged = fail_open_flagged;
        records_.append_ticket_record(std::move(rec));

        TicketResponse resp;
        resp.id_res = identity_.id;
        resp.ticket = std::move(tkt);
        resp.rnd_ik_tkt = std::move(rnd_ik);
        resp.nonce = nonce + 1;
        resp.t_now = now();
        return resp;
    } catch (const store::RecordStore::Backpressure&) {
        revert();
        return Error{Err::StoreBackpressure, "record queue full"};
    } catch (const CryptoError& e) {
        revert();
        return Error{Err::BadRequest, std::string("crypto failure: ") +
                                          e.what()};
    }
}

Health Ltca::health_selfcheck() {
    // Stage "sign": the service key must produce signatures that verify
    // under the public key peers actually hold (the certificate's).
    Bytes probe = to_bytes("health probe");
    try {
        Bytes sig = key_.sign(probe);
        if (!verify(identity_.certificate.subject_public_key, probe, sig)) {
            return {false, "sign"};
        }
    } catch (const CryptoError&) {
        return {false, "sign"};
    }

    // Stage "guard": probe the real backend with a reserved key; a dead
    // backend is a health failure only when the policy is fail-close.
    if (!config_.fail_open) {
        Bytes reserved = to_bytes("__health__" + identity_.id);
        try {
            auto claim = guard_.claim_ticket_interval(reserved, 0, 1);
            if (claim.granted()) {
                guard_.revert_ticket_interval(reserved, claim.prev);
            }
        } catch (const GuardUnavailableError&) {
            return {false, "guard"};
        }
    }

    // Stage "issue": full dummy issuance against a throwaway LTC and a
    // private guard; nothing touches real state and nothing is emitted.
    try {
        guard::InMemoryGuard dummy_guard;
        KeyPair vkey = KeyPair::generate();
        LongTermCertificate dummy_ltc;
        dummy_ltc.serial = gen_rnd(kSerialLen);
        dummy_ltc.subject_public_key = vkey.public_bytes();
        dummy_ltc.issuer_id = identity_.id;
        dummy_ltc.valid_from = 0;
        dummy_ltc.valid_to = UINT64_MAX;
        dummy_ltc.signature = key_.sign(dummy_ltc.tbs_bytes());

        uint64_t t = now();
        auto claim =
            dummy_guard.claim_ticket_interval(dummy_ltc.serial, t, t + 1);
        if (!claim.granted()) return {false, "issue"};

        Ticket tkt;
        tkt.serial = gen_rnd(kSerialLen);
        tkt.target_hash = hash_fields({to_bytes("dummy"), gen_rnd()});
        tkt.t_s = t;
        tkt.t_e = t + 1;
        tkt.exp_tkt = t + 1;
        Bytes rnd_ik = gen_rnd();
        tkt.ik_tkt = hash_fields(
            {dummy_ltc.to_bytes(), u64be(tkt.t_s), u64be(tkt.t_e), rnd_ik});
        tkt.signature = key_.sign(tkt.tbs_bytes());
        if (!tkt.verify_under(identity_.certificate.subject_public_key)) {
            return {false, "issue"};
        }
        Digest expect = hash_fields(
            {dummy_ltc.to_bytes(), u64be(tkt.t_s), u64be(tkt.t_e), rnd_ik});
        if (expect != tkt.ik_tkt) return {false, "issue"};
    } catch (const std::exception&) {
        return {false, "issue"};
    }
    return {true, ""};
}

}  // namespace vpki::ltca
