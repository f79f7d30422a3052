#ifndef VPKI_PCA_PCA_HPP
#define VPKI_PCA_PCA_HPP

#include <functional>
#include <string>
#include <vector>

#include "vpki/core/chain.hpp"
#include "vpki/core/crypto.hpp"
#include "vpki/core/outcome.hpp"
#include "vpki/core/types.hpp"
#include "vpki/guard/guard.hpp"
#include "vpki/store/record_store.hpp"

namespace vpki::pca {

// Certificate signing request: a candidate public key plus a self-signature
// proving possession of the matching private key.
struct Csr {
    Bytes public_key;  // 65 bytes
    Bytes signature;   // over canonical([public_key]) under the same key

    Bytes signed_payload() const;
};

struct PseudonymRequest {
    std::string id_req;
    Bytes rnd_n_tkt;     // 32 bytes, opens the ticket's target_hash
    Bytes ticket_bytes;  // serialized ticket as received from the issuer
    std::vector<Csr> csrs;
    uint64_t nonce = 0;
    uint64_t t_now = 0;
};

struct PseudonymResponse {
    std::string id_res;
    std::vector<Pseudonym> pseudonyms;
    Bytes rnd_v;         // 32 bytes; lets the holder rederive the chain
    uint64_t nonce = 0;  // request nonce + 1
    uint64_t t_now = 0;
};

// Resolution query, restricted to authorized resolution authorities.
struct ResolveRequest {
    Digest serial{};  // SN^i of the suspicious pseudonym
    Bytes signature;  // RA signature over canonical([serial])

    Bytes signed_payload() const;
};

// Signed resolution answer: enough to recompute the pseudonym's
// identifiable key without naming any vehicle.
struct Resolution {
    Digest serial{};
    Bytes ticket_bytes;
    Digest rnd_ik_p{};  // H^i(rnd_v) for the queried position i
    Bytes signature;    // PCA signature over the fields above

    Bytes signed_payload() const;
};

struct Health {
    bool healthy = false;
    std::string stage;
};

struct PcaConfig {
    uint64_t tau_p_s = 300;  // fixed pseudonym lifetime, domain-wide
    size_t max_batch = 1000;
    uint64_t freshness_window_s = 300;
    bool fail_open = false;
    std::function<uint64_t()> now_fn;
};

struct TestHooks {
    bool fail_after_guard = false;
    bool break_chain = false;  // health selfcheck fault injection
};

class Pca {
public:
    Pca(CaIdentity identity, KeyPair key, guard::SybilGuard& guard,
        store::RecordStore& records, PcaConfig config = {});

    Outcome<PseudonymResponse> issue_pseudonyms(const PseudonymRequest& req);
    Outcome<Resolution> resolve_pseudonym(const ResolveRequest& req);
    Health health_selfcheck();

    void add_trusted_ltca(const CaIdentity& ltca);
    void add_authorized_ra(const CaIdentity& ra);

    const CaIdentity& identity() const { return identity_; }
    uint64_t tau_p() const { return config_.tau_p_s; }
    TestHooks& hooks() { return hooks_; }

private:
    uint64_t now() const;

    CaIdentity identity_;
    KeyPair key_;
    guard::SybilGuard& guard_;
    store::RecordStore& records_;
    PcaConfig config_;
    TestHooks hooks_;
    TrustStore ltcas_;
    std::vector<LongTermCertificate> ras_;
};

// Smallest multiple of tau at or after t (domain epoch 0 = Unix epoch).
uint64_t align_up(uint64_t t, uint64_t tau);

}  // namespace vpki::pca

#endif
