#ifndef VPKI_GUARD_GUARD_HPP
#define VPKI_GUARD_GUARD_HPP

#include <map>
#include <mutex>
#include <optional>

#include "vpki/core/bytes.hpp"
#include "vpki/core/outcome.hpp"

namespace vpki::guard {

enum class Claim { Granted, Denied };

// Result of claim_ticket_interval. `prev` carries the stored expiry that the
// claim replaced, needed to revert on downstream failure.
struct IntervalClaim {
    Claim status;
    std::optional<uint64_t> prev;

    bool granted() const { return status == Claim::Granted; }
};

// Atomic check-and-set store shared by all replicas of a micro-service.
// Every operation is atomic and totally ordered with respect to all others on
// the same store; correctness under concurrent replicas rests entirely on
// that contract, not on any particular backend.
//
// Two logical namespaces over one store: ticket-interval entries keyed by the
// LTC serial, single-use entries keyed by the ticket serial.
//
// All operations throw GuardUnavailableError when the backend is down.
class SybilGuard {
public:
    virtual ~SybilGuard() = default;

    // Grants iff no entry exists for the key or the stored expiry lies at or
    // before tkt_start (non-overlap; equality admits back-to-back intervals).
    virtual IntervalClaim claim_ticket_interval(ByteView sn_ltc,
                                                uint64_t tkt_start,
                                                uint64_t tkt_exp) = 0;

    // Restores the pre-claim value; prev == nullopt deletes the key.
    // Idempotent: double revert is harmless.
    virtual void revert_ticket_interval(ByteView sn_ltc,
                                        std::optional<uint64_t> prev) = 0;

    // Grants iff the key is absent or false; sets true on grant.
    virtual Claim claim_ticket_once(ByteView sn_tkt) = 0;

    // Sets the used-flag back to false. Idempotent.
    virtual void revert_ticket_once(ByteView sn_tkt) = 0;
};

class InMemoryGuard : public SybilGuard {
public:
    IntervalClaim claim_ticket_interval(ByteView sn_ltc, uint64_t tkt_start,
                                        uint64_t tkt_exp) override;
    void revert_ticket_interval(ByteView sn_ltc,
                                std::optional<uint64_t> prev) override;
    Claim claim_ticket_once(ByteView sn_tkt) override;
    void revert_ticket_once(ByteView sn_tkt) override;

    // Garbage collection: drops ticket-interval entries whose stored expiry
    // is older than `cutoff_s`. Callers pass now - 2*Gamma so no live request
    // can race a swept entry.
    size_t sweep_expired(uint64_t cutoff_s);

    // Test hook simulating a backend outage.
    void set_available(bool available);

    size_t interval_entries() const;
    size_t once_entries() const;

private:
    void check_available() const;

    mutable std::mutex mu_;
    bool available_ = true;
    std::map<Bytes, uint64_t> intervals_;
    std::map<Bytes, bool> used_;
};

}  // namespace vpki::guard

#endif
