#ifndef VPKI_VEHICLE_CLIENT_HPP
#define VPKI_VEHICLE_CLIENT_HPP

#include <functional>
#include <string>
#include <vector>

#include "vpki/core/crypto.hpp"
#include "vpki/core/outcome.hpp"
#include "vpki/core/types.hpp"
#include "vpki/ltca/ltca.hpp"
#include "vpki/pca/pca.hpp"

namespace vpki::vehicle {

// A pseudonym the vehicle may speak under, with its private key.
struct PoolEntry {
    Pseudonym pseudonym;
    Bytes private_key;  // 32-byte scalar, never transmitted
};

// Transport hooks; tests wire these to in-process services, the CLI wires
// them to HTTP clients.
using TicketFn =
    std::function<Outcome<ltca::TicketResponse>(const ltca::TicketRequest&)>;
using ForeignTicketFn = std::function<Outcome<ltca::TicketResponse>(
    const ltca::ForeignTicketRequest&)>;
using PseudonymFn = std::function<Outcome<pca::PseudonymResponse>(
    const pca::PseudonymRequest&)>;

// What the client must know about a CA it talks to.
struct CaEndpoint {
    std::string id;
    Bytes public_key;  // from the CA certificate, already validated
    uint64_t tau_p = 300;  // pseudonym lifetime; meaningful for PCAs
};

struct ClientConfig {
    std::function<uint64_t()> now_fn;
};

class Client {
public:
    Client(KeyPair key, LongTermCertificate ltc, ClientConfig config = {});

    // Draws rnd_tkt, hides the target behind target_hash, signs the payload.
    // The returned rnd_tkt must be retained for the pseudonym leg.
    std::pair<ltca::TicketRequest, Bytes> build_ticket_request(
        const std::string& target_ca_id, uint64_t t_s, uint64_t t_e);

    // Generates n keypairs and CSRs, submits, and verifies the full response
    // (signatures, slot alignment and abutment, serial/ik chain) before
    // accepting anything into the pool.
    Outcome<std::vector<PoolEntry>> acquire_pseudonyms(
        const CaEndpoint& pca, const ltca::TicketResponse& ticket,
        const Bytes& rnd_tkt, size_t n, const PseudonymFn& send);

    // Full foreign-domain flow: bearer ticket from the home issuer, native
    // ticket from the foreign issuer, batch from the foreign PCA.
    Outcome<std::vector<PoolEntry>> acquire_foreign(
        const CaEndpoint& home_ltca, const TicketFn& home_send,
        const CaEndpoint& foreign_ltca, const ForeignTicketFn& foreign_send,
        const CaEndpoint& foreign_pca, const PseudonymFn& pca_send,
        uint64_t t_s, uint64_t t_e, size_t n);

    // True when remaining pool coverage drops below the larger of the
    // remaining trip time and the low-water threshold of 2 lifetimes.
    static bool refill_needed(const std::vector<PoolEntry>& pool,
                              uint64_t now, uint64_t trip_remaining_s,
                              uint64_t tau_p);

    const std::vector<PoolEntry>& pool() const { return pool_; }
    const LongTermCertificate& ltc() const { return ltc_; }

private:
    uint64_t now() const;

    KeyPair key_;
    LongTermCertificate ltc_;
    ClientConfig config_;
    std::vector<PoolEntry> pool_;
};

}  // namespace vpki::vehicle

#endif
