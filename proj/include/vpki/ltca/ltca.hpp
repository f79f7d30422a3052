#ifndef VPKI_LTCA_LTCA_HPP
#define VPKI_LTCA_LTCA_HPP

#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>

#include "vpki/core/crypto.hpp"
#include "vpki/core/outcome.hpp"
#include "vpki/core/types.hpp"
#include "vpki/guard/guard.hpp"
#include "vpki/store/record_store.hpp"

namespace vpki::ltca {

// Anonymized ticket request. The target CA is named only through
// target_hash = H(target_id || rnd_tkt); the issuer never sees the id.
struct TicketRequest {
    std::string id_req;
    Digest target_hash{};
    uint64_t t_s = 0;
    uint64_t t_e = 0;
    uint64_t nonce = 0;
    uint64_t t_now = 0;
    LongTermCertificate ltc;
    Bytes signature;  // under the LTC key, over signed_payload()

    Bytes signed_payload() const;
};

struct TicketResponse {
    std::string id_res;
    Ticket ticket;
    Bytes rnd_ik_tkt;  // 32 bytes, returned to the requester only
    uint64_t nonce = 0;  // request nonce + 1
    uint64_t t_now = 0;
};

// Cross-domain request: the bearer credential is a ticket from a trusted
// peer issuer whose target_hash names this service, so no long-term
// identity crosses the domain boundary.
struct ForeignTicketRequest {
    std::string id_req;
    std::string home_issuer_id;
    Bytes presented_ticket;  // serialized bearer ticket
    Bytes rnd_presented;     // opens the bearer ticket's target_hash
    Digest target_hash{};    // target of the new ticket
    uint64_t t_s = 0;
    uint64_t t_e = 0;
    uint64_t nonce = 0;
    uint64_t t_now = 0;
};

struct Health {
    bool healthy = false;
    std::string stage;  // failing stage name when unhealthy
};

struct LtcaConfig {
    uint64_t freshness_window_s = 300;
    uint64_t ticket_grace_s = 0;        // exp_tkt = t_e + grace
    uint64_t max_coverage_s = 7 * 86400;
    bool fail_open = false;             // guard outage policy
    std::function<uint64_t()> now_fn;   // defaults to system clock
};

struct TestHooks {
    bool fail_after_guard = false;  // injected fault between grant and reply
};

class Ltca {
public:
    Ltca(CaIdentity identity, KeyPair key, guard::SybilGuard& guard,
         store::RecordStore& records, LtcaConfig config = {});

    Outcome<LongTermCertificate> register_vehicle(const Bytes& public_key,
                                                  uint64_t valid_from,
                                                  uint64_t valid_to);

    // Imports a certificate issued by a sibling replica of the same service,
    // standing in for a shared registration database. Rejected unless the
    // signature verifies under this service's own key.
    Outcome<std::monostate> adopt_registration(const LongTermCertificate& ltc);

    Outcome<TicketResponse> issue_ticket(const TicketRequest& req);
    Outcome<TicketResponse> issue_foreign_ticket(
        const ForeignTicketRequest& req);

    Health health_selfcheck();

    void add_trusted_peer(const CaIdentity& peer);
    void deny(const Bytes& sn_ltc);

    const CaIdentity& identity() const { return identity_; }
    TestHooks& hooks() { return hooks_; }

private:
    Outcome<TicketResponse> build_ticket(const Bytes& credential_bytes,
                                          const Digest& target_hash,
                                          uint64_t t_s, uint64_t t_e,
                                          uint64_t nonce, const Bytes& sn_ltc,
                                          bool fail_open_flagged,
                                          bool guard_granted,
                                          std::optional<uint64_t> guard_prev);
    uint64_t now() const;

    CaIdentity identity_;
    KeyPair key_;
    guard::SybilGuard& guard_;
    store::RecordStore& records_;
    LtcaConfig config_;
    TestHooks hooks_;
    TrustStore peers_;

    mutable std::mutex mu_;
    std::map<Bytes, Bytes> registered_;   // public key -> SN_LTC
    std::map<Bytes, LongTermCertificate> by_serial_;
    std::set<Bytes> denied_;
};

}  // namespace vpki::ltca

#endif
