#ifndef VPKI_CORE_CRYPTO_HPP
#define VPKI_CORE_CRYPTO_HPP

#include <initializer_list>
#include <stdexcept>

#include "vpki/core/bytes.hpp"

namespace vpki {

class CryptoError : public std::runtime_error {
public:
    explicit CryptoError(const std::string& msg) : std::runtime_error(msg) {}
};

// SHA-256.
Digest hash(ByteView data);

// Canonical-encode the fields, then hash. This is the single choke point
// through which every protocol hash input is built.
Digest hash_fields(std::initializer_list<ByteView> fields);

// H applied i times to the seed; i >= 1.
Digest iterated_hash(ByteView seed, uint64_t i);

// 32 bytes from the OS CSPRNG. Throws CryptoError on entropy failure.
Bytes gen_rnd();
Bytes gen_rnd(size_t n);

// ECDSA over P-256. Public keys travel as 65-byte uncompressed SEC1 points,
// private keys as 32-byte scalars.
class KeyPair {
public:
    static KeyPair generate();
    static KeyPair from_private(ByteView scalar);

    const Bytes& public_bytes() const { return public_; }
    const Bytes& private_bytes() const { return private_; }

    Bytes sign(ByteView msg) const;

private:
    KeyPair() = default;
    Bytes public_;   // 65-byte uncompressed point
    Bytes private_;  // 32-byte scalar
};

// Returns false for bad signatures and for malformed keys or signature
// encodings; never throws on untrusted input.
bool verify(ByteView public_key, ByteView msg, ByteView signature);

}  // namespace vpki

#endif
