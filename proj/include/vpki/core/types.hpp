#ifndef VPKI_CORE_TYPES_HPP
#define VPKI_CORE_TYPES_HPP

#include <optional>
#include <string>

#include "vpki/core/bytes.hpp"
#include "vpki/core/crypto.hpp"

namespace vpki {

constexpr size_t kSerialLen = 16;
constexpr size_t kPublicKeyLen = 65;

// Field order in every encoding matches the tuple order in the protocol
// messages; the canonical byte string (not any transport representation) is
// what gets hashed and signed.

struct LongTermCertificate {
    Bytes serial;             // 16 bytes
    Bytes subject_public_key; // 65 bytes
    std::string issuer_id;
    uint64_t valid_from = 0;  // UTC seconds
    uint64_t valid_to = 0;
    Bytes signature;

    Bytes tbs_bytes() const;
    Bytes to_bytes() const;
    static LongTermCertificate from_bytes(ByteView data);

    bool verify_under(ByteView issuer_public_key) const;
    bool within_window(uint64_t now_s) const {
        return valid_from <= now_s && now_s < valid_to;
    }
};

struct Ticket {
    Bytes serial;        // 16 bytes, SN_tkt
    Digest target_hash;  // H(Id_PCA || Rnd_tkt), opaque to the issuing LTCA
    Digest ik_tkt;       // one-way binding to the presented credential
    uint64_t t_s = 0;    // requested pseudonym-coverage window, UTC seconds
    uint64_t t_e = 0;
    uint64_t exp_tkt = 0;
    Bytes signature;     // LTCA signature over the canonical tuple

    Bytes tbs_bytes() const;
    Bytes to_bytes() const;
    static Ticket from_bytes(ByteView data);

    bool verify_under(ByteView ltca_public_key) const;
};

struct Pseudonym {
    Digest serial;    // SN^i, chained
    Bytes public_key; // K^i
    Digest ik_p;      // IK_{P^i}
    uint64_t t_s = 0; // slot, UTC seconds; t_e - t_s == tau_P
    uint64_t t_e = 0;
    std::string issuer_id;  // routing for the validation process
    Bytes signature;        // PCA signature

    Bytes tbs_bytes() const;
    Bytes to_bytes() const;
    static Pseudonym from_bytes(ByteView data);

    bool verify_under(ByteView pca_public_key) const;
    bool within_window(uint64_t now_s) const {
        return t_s <= now_s && now_s < t_e;
    }
};

// A CA as known to peers: identifier plus its certificate (LTC-shaped,
// issued by the RCA or a cross-certifying peer).
struct CaIdentity {
    std::string id;
    LongTermCertificate certificate;
};

// Trust anchors plus already-validated intermediate CA certificates.
// validate() accepts a certificate that chains to an anchor through the
// stored certificates (cross certification included).
class TrustStore {
public:
    void add_anchor(const LongTermCertificate& cert);
    void add_certificate(const LongTermCertificate& cert);

    bool validate(const LongTermCertificate& cert) const;

    // Looks for a stored trusted certificate whose key verifies `msg`/`sig`.
    std::optional<LongTermCertificate> find_verifier(ByteView msg,
                                                     ByteView sig) const;

private:
    std::vector<LongTermCertificate> anchors_;
    std::vector<LongTermCertificate> certs_;
};

}  // namespace vpki

#endif
