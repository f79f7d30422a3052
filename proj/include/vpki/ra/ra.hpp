#ifndef VPKI_RA_RA_HPP
#define VPKI_RA_RA_HPP

#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "vpki/core/crypto.hpp"
#include "vpki/core/outcome.hpp"
#include "vpki/core/types.hpp"
#include "vpki/pca/pca.hpp"

namespace vpki::ra {

// A report from a vehicle about a suspicious pseudonym, signed under one of
// the reporter's own currently valid pseudonyms. No long-term identity is
// involved on either side.
struct ReportEnvelope {
    Bytes suspicious_pseudonym;  // serialized pseudonym under scrutiny
    Bytes reporter_pseudonym;    // serialized pseudonym of the reporter
    Bytes signature;             // under the reporter pseudonym's key

    Bytes signed_payload() const;
};

enum class Verdict { ValidIssuance, InvalidIssuance };

struct ValidationReport {
    Digest pseudonym_serial{};
    Verdict verdict = Verdict::InvalidIssuance;
    std::string stage;     // failing check when invalid, e.g. "ik"
    Bytes ticket_serial;   // evidence
    std::string pca_id;
    Digest claimed_ik{};
    Digest recomputed_ik{};
};

struct RaConfig {
    uint32_t validations_per_min = 10;  // per reporter
    std::function<uint64_t()> now_fn;
};

// Calls the issuing CA's resolution endpoint; wired to an in-process service
// in tests and to an HTTP client in the gateway.
using ResolveFn =
    std::function<Outcome<pca::Resolution>(const pca::ResolveRequest&)>;

class Ra {
public:
    Ra(CaIdentity identity, KeyPair key, RaConfig config = {});

    void add_trusted_ltca(const CaIdentity& ltca);
    void register_pca(const CaIdentity& pca, ResolveFn resolve);

    Outcome<ValidationReport> validate_issuance(const ReportEnvelope& report);

    const CaIdentity& identity() const { return identity_; }

private:
    uint64_t now() const;
    bool admit(const Digest& reporter_serial);

    CaIdentity identity_;
    KeyPair key_;
    RaConfig config_;
    TrustStore ltcas_;

    struct PcaEntry {
        LongTermCertificate certificate;
        ResolveFn resolve;
    };
    std::map<std::string, PcaEntry> pcas_;

    struct BucketState {
        double tokens;
        uint64_t refilled_at;
    };
    std::mutex mu_;
    std::map<Digest, BucketState> buckets_;
};

}  // namespace vpki::ra

#endif
