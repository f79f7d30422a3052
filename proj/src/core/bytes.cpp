#include "vpki/core/bytes.hpp"

#include <algorithm>
#include <stdexcept>

namespace vpki {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";
constexpr char kB64Url[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int b64url_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xf]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("bad hex digit");
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    }
    return out;
}

std::string base64url_encode(ByteView data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        uint32_t v = data[i] << 16 | data[i + 1] << 8 | data[i + 2];
        out.push_back(kB64Url[v >> 18]);
        out.push_back(kB64Url[(v >> 12) & 0x3f]);
        out.push_back(kB64Url[(v >> 6) & 0x3f]);
        out.push_back(kB64Url[v & 0x3f]);
    }
    size_t rem = data.size() - i;
    if (rem == 1) {
        uint32_t v = data[i] << 16;
        out.push_back(kB64Url[v >> 18]);
        out.push_back(kB64Url[(v >> 12) & 0x3f]);
    } else if (rem == 2) {
        uint32_t v = data[i] << 16 | data[i + 1] << 8;
        out.push_back(kB64Url[v >> 18]);
        out.push_back(kB64Url[(v >> 12) & 0x3f]);
        out.push_back(kB64Url[(v >> 6) & 0x3f]);
    }
    return out;
}

Bytes base64url_decode(std::string_view text) {
    if (text.size() % 4 == 1) throw std::invalid_argument("bad base64url length");
    Bytes out;
    out.reserve(text.size() / 4 * 3 + 2);
    uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        int v = b64url_value(c);
        if (v < 0) throw std::invalid_argument("bad base64url character");
        acc = acc << 6 | static_cast<uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<uint8_t>(acc >> bits));
        }
    }
    return out;
}

void put_u32be(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u64be(Bytes& out, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<uint8_t>(v >> shift));
    }
}

uint32_t get_u32be(ByteView b, size_t off) {
    if (off + 4 > b.size()) throw std::out_of_range("u32 out of range");
    return uint32_t(b[off]) << 24 | uint32_t(b[off + 1]) << 16 |
           uint32_t(b[off + 2]) << 8 | uint32_t(b[off + 3]);
}

uint64_t get_u64be(ByteView b, size_t off) {
    if (off + 8 > b.size()) throw std::out_of_range("u64 out of range");
    uint64_t v = 0;
    for (size_t i = 0; i < 8; ++i) v = v << 8 | b[off + i];
    return v;
}

bool contains_bytes(ByteView hay, ByteView needle) {
    if (needle.empty()) return true;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) !=
           hay.end();
}

}  // namespace vpki
