#ifndef VPKI_TOOLS_COMMON_HPP
#define VPKI_TOOLS_COMMON_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vpki/core/bytes.hpp"

namespace vpki::tools {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' ||
                          s.back() == ' '))
        s.pop_back();
    return s;
}

// Key and certificate files hold a single base64url line.
inline Bytes read_bytes_file(const std::string& path) {
    return base64url_decode(trimmed(slurp(path)));
}

inline void write_bytes_file(const std::string& path, ByteView bytes) {
    spit(path, base64url_encode(bytes) + "\n");
}

// "http://host:port" or "host:port" -> (host, port).
inline std::pair<std::string, int> split_endpoint(const std::string& url) {
    std::string rest = url;
    auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    auto slash = rest.find('/');
    if (slash != std::string::npos) rest = rest.substr(0, slash);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
        throw std::runtime_error("endpoint needs host:port, got " + url);
    }
    return {rest.substr(0, colon), std::stoi(rest.substr(colon + 1))};
}

}  // namespace vpki::tools

#endif
