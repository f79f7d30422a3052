#include "vpki/core/encoding.hpp"

#include <limits>

namespace vpki {

namespace {
void append_field(Bytes& out, ByteView f) {
    if (f.size() > std::numeric_limits<uint32_t>::max()) {
        throw EncodingError("field too long");
    }
    put_u32be(out, static_cast<uint32_t>(f.size()));
    out.insert(out.end(), f.begin(), f.end());
}
}  // namespace

Bytes canonical_encode(std::initializer_list<ByteView> fields) {
    Bytes out;
    for (ByteView f : fields) append_field(out, f);
    return out;
}

Bytes canonical_encode(const std::vector<Bytes>& fields) {
    Bytes out;
    for (const Bytes& f : fields) append_field(out, f);
    return out;
}

Bytes Decoder::field() {
    uint32_t len = get_u32be(data_, pos_);
    pos_ += 4;
    if (pos_ + len > data_.size()) throw EncodingError("truncated field");
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
}

Bytes Decoder::fixed(size_t n) {
    Bytes f = field();
    if (f.size() != n) throw EncodingError("unexpected field length");
    return f;
}

uint64_t Decoder::u64_field() {
    Bytes f = fixed(8);
    return get_u64be(f, 0);
}

Digest Decoder::digest_field() {
    Bytes f = fixed(32);
    Digest d;
    std::copy(f.begin(), f.end(), d.begin());
    return d;
}

void Decoder::expect_done() const {
    if (!done()) throw EncodingError("trailing bytes");
}

}  // namespace vpki
