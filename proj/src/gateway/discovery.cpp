#include "vpki/gateway/discovery.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vpki::gateway {

void Registry::add(DomainDescriptor d) {
    domains_[d.id] = std::move(d);
}

Outcome<DomainDescriptor> Registry::discover(
    const std::string& domain_id) const {
    auto it = domains_.find(domain_id);
    if (it == domains_.end()) {
        return Error{Err::UnknownDomain, "no such domain: " + domain_id};
    }
    return it->second;
}

std::vector<std::string> Registry::domains() const {
    std::vector<std::string> out;
    for (const auto& [id, d] : domains_) out.push_back(id);
    return out;
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{}
                                          : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

void apply_env_overrides(std::map<std::string, std::string>& config) {
    for (auto& [key, value] : config) {
        std::string env = "VPKI_";
        for (char c : key) {
            env += std::isalnum(static_cast<unsigned char>(c))
                       ? char(std::toupper(static_cast<unsigned char>(c)))
                       : '_';
        }
        if (const char* v = std::getenv(env.c_str())) value = v;
    }
}

std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto config = parse_config(buf.str());
    apply_env_overrides(config);
    return config;
}

std::vector<DomainDescriptor> domains_from_config(
    const std::map<std::string, std::string>& config) {
    auto get = [&](const std::string& key) -> const std::string* {
        auto it = config.find(key);
        return it == config.end() ? nullptr : &it->second;
    };
    // Collect domain names from "domain.<name>." prefixes.
    std::vector<std::string> names;
    for (const auto& [key, value] : config) {
        if (key.rfind("domain.", 0) != 0) continue;
        std::string rest = key.substr(7);
        std::string name = rest.substr(0, rest.find('.'));
        if (names.empty() || names.back() != name) {
            bool seen = false;
            for (const auto& n : names) seen = seen || n == name;
            if (!seen) names.push_back(name);
        }
    }
    std::vector<DomainDescriptor> out;
    for (const auto& name : names) {
        std::string base = "domain." + name + ".";
        DomainDescriptor d;
        d.id = name;
        if (const auto* v = get(base + "ltca.id")) d.ltca_id = *v;
        if (const auto* v = get(base + "ltca.endpoint")) d.ltca_endpoint = *v;
        if (const auto* v = get(base + "ltca.certificate")) {
            d.ltca_certificate =
                LongTermCertificate::from_bytes(base64url_decode(*v));
        }
        if (const auto* v = get(base + "epoch")) d.epoch = std::stoull(*v);
        for (int k = 1;; ++k) {
            std::string pbase = base + "pca." + std::to_string(k) + ".";
            const auto* id = get(pbase + "id");
            if (!id) break;
            PcaDescriptor p;
            p.id = *id;
            if (const auto* v = get(pbase + "endpoint")) p.endpoint = *v;
            if (const auto* v = get(pbase + "certificate")) {
                p.certificate =
                    LongTermCertificate::from_bytes(base64url_decode(*v));
            }
            if (const auto* v = get(pbase + "tau_p")) p.tau_p = std::stoull(*v);
            if (const auto* v = get(pbase + "gamma")) p.gamma = std::stoull(*v);
            d.pcas.push_back(std::move(p));
        }
        out.push_back(std::move(d));
    }
    return out;
}

LongTermCertificate rca_certify(const KeyPair& rca_key,
                                const std::string& issuer_id,
                                const Bytes& ca_public_key,
                                uint64_t valid_from, uint64_t valid_to) {
    LongTermCertificate cert;
    cert.serial = gen_rnd(kSerialLen);
    cert.subject_public_key = ca_public_key;
    cert.issuer_id = issuer_id;
    cert.valid_from = valid_from;
    cert.valid_to = valid_to;
    cert.signature = rca_key.sign(cert.tbs_bytes());
    return cert;
}

}  // namespace vpki::gateway
