#include "vpki/ra/ra.hpp"

#include <chrono>

#include "vpki/core/encoding.hpp"

namespace vpki::ra {

namespace {

uint64_t system_now() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

}  // namespace

Bytes ReportEnvelope::signed_payload() const {
    return canonical_encode({suspicious_pseudonym});
}

Ra::Ra(CaIdentity identity, KeyPair key, RaConfig config)
    : identity_(std::move(identity)),
      key_(std::move(key)),
      config_(std::move(config)) {}

uint64_t Ra::now() const {
    return config_.now_fn ? config_.now_fn() : system_now();
}

void Ra::add_trusted_ltca(const CaIdentity& ltca) {
    ltcas_.add_anchor(ltca.certificate);
}

void Ra::register_pca(const CaIdentity& pca, ResolveFn resolve) {
    pcas_[pca.id] = PcaEntry{pca.certificate, std::move(resolve)};
}

bool Ra::admit(const Digest& reporter_serial) {
    double rate = config_.validations_per_min / 60.0;
    double cap = config_.validations_per_min;
    uint64_t t = now();
    std::lock_guard lock(mu_);
    auto [it, fresh] = buckets_.try_emplace(reporter_serial,
                                            BucketState{cap, t});
    BucketState& b = it->second;
    if (!fresh) {
        b.tokens = std::min(cap, b.tokens + rate * double(t - b.refilled_at));
        b.refilled_at = t;
    }
    if (b.tokens < 1.0) return false;
    b.tokens -= 1.0;
    return true;
}

Outcome<ValidationReport> Ra::validate_issuance(const ReportEnvelope& report) {
    uint64_t t = now();

    Pseudonym reporter;
    Pseudonym suspect;
    try {
        reporter = Pseudonym::from_bytes(report.reporter_pseudonym);
        suspect = Pseudonym::from_bytes(report.suspicious_pseudonym);
    } catch (const std::exception&) {
        return Error{Err::BadRequest, "unparseable pseudonym"};
    }
    if (!reporter.within_window(t) ||
        !verify(reporter.public_key, report.signed_payload(),
                report.signature)) {
        return Error{Err::BadReporterSignature,
                     "report not signed under a currently valid pseudonym"};
    }
    if (!admit(reporter.serial)) {
        return Error{Err::RateLimited, "reporter over validation budget"};
    }

    auto entry = pcas_.find(suspect.issuer_id);
    if (entry == pcas_.end()) {
        return Error{Err::UnknownPca, "no resolver for " + suspect.issuer_id};
    }

    pca::ResolveRequest rr;
    rr.serial = suspect.serial;
    rr.signature = key_.sign(rr.signed_payload());
    auto resolved = entry->second.resolve(rr);
    if (!resolved.ok()) {
        return Error{Err::PcaRefused,
                     "resolution refused: " + resolved.error().detail};
    }
    const pca::Resolution& res = resolved.value();
    if (res.serial != suspect.serial ||
        !verify(entry->second.certificate.subject_public_key,
                res.signed_payload(), res.signature)) {
        return Error{Err::BadPcaSignature, "resolution signature invalid"};
    }

    Ticket tkt;
    try {
        tkt = Ticket::from_bytes(res.ticket_bytes);
    } catch (const std::exception&) {
        return Error{Err::BadTicketSignature, "unparseable embedded ticket"};
    }
    if (!ltcas_.find_verifier(tkt.tbs_bytes(), tkt.signature)) {
        return Error{Err::BadTicketSignature,
                     "embedded ticket not signed by a trusted issuer"};
    }

    ValidationReport out;
    out.pseudonym_serial = suspect.serial;
    out.ticket_serial = tkt.serial;
    out.pca_id = suspect.issuer_id;
    out.claimed_ik = suspect.ik_p;
    out.recomputed_ik =
        hash_fields({tkt.ik_tkt, suspect.public_key, u64be(suspect.t_s),
                     u64be(suspect.t_e), res.rnd_ik_p});
    if (out.recomputed_ik == out.claimed_ik) {
        out.verdict = Verdict::ValidIssuance;
    } else {
        out.verdict = Verdict::InvalidIssuance;
        out.stage = "ik";
    }
    return out;
}

}  // namespace vpki::ra
