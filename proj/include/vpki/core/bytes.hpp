#ifndef VPKI_CORE_BYTES_HPP
#define VPKI_CORE_BYTES_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpki {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

// SHA-256 output.
using Digest = std::array<uint8_t, 32>;

inline Bytes to_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(ByteView b) {
    return std::string(b.begin(), b.end());
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

// Unpadded base64url (RFC 4648 §5), used for byte fields on the JSON wire.
std::string base64url_encode(ByteView data);
Bytes base64url_decode(std::string_view text);

void put_u32be(Bytes& out, uint32_t v);
void put_u64be(Bytes& out, uint64_t v);
uint32_t get_u32be(ByteView b, size_t off);
uint64_t get_u64be(ByteView b, size_t off);

inline Bytes u64be(uint64_t v) {
    Bytes b;
    put_u64be(b, v);
    return b;
}

// True iff `needle` occurs as a contiguous substring of `hay`.
bool contains_bytes(ByteView hay, ByteView needle);

}  // namespace vpki

#endif
