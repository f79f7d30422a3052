#ifndef VPKI_CORE_ENCODING_HPP
#define VPKI_CORE_ENCODING_HPP

#include <initializer_list>
#include <stdexcept>

#include "vpki/core/bytes.hpp"

namespace vpki {

class EncodingError : public std::runtime_error {
public:
    explicit EncodingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Length-prefixed field concatenation: per field a 4-byte big-endian length
// followed by the field bytes. Injective over field lists, which is what makes
// it safe as the single input format for every hash and signature in the
// protocols.
Bytes canonical_encode(std::initializer_list<ByteView> fields);
Bytes canonical_encode(const std::vector<Bytes>& fields);

// Sequential reader for canonically encoded field streams.
class Decoder {
public:
    explicit Decoder(ByteView data) : data_(data) {}

    Bytes field();
    Bytes fixed(size_t n);       // field that must be exactly n bytes
    uint64_t u64_field();        // field that must be an 8-byte big-endian int
    Digest digest_field();
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

private:
    ByteView data_;
    size_t pos_ = 0;
};

}  // namespace vpki

#endif
