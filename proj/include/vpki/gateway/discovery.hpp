#ifndef VPKI_GATEWAY_DISCOVERY_HPP
#define VPKI_GATEWAY_DISCOVERY_HPP

#include <map>
#include <string>
#include <vector>

#include "vpki/core/crypto.hpp"
#include "vpki/core/outcome.hpp"
#include "vpki/core/types.hpp"

namespace vpki::gateway {

// Directory entry for one domain: where its CAs live and the parameters a
// vehicle needs before it can ask for anything. Served without client
// authentication.
struct PcaDescriptor {
    std::string id;
    std::string endpoint;
    LongTermCertificate certificate;
    uint64_t tau_p = 300;   // pseudonym lifetime, seconds
    uint64_t gamma = 86400; // coverage window granted per ticket, seconds
};

struct DomainDescriptor {
    std::string id;
    std::string ltca_id;
    std::string ltca_endpoint;
    LongTermCertificate ltca_certificate;
    std::vector<PcaDescriptor> pcas;
    uint64_t epoch = 0;
};

class Registry {
public:
    void add(DomainDescriptor d);
    Outcome<DomainDescriptor> discover(const std::string& domain_id) const;
    std::vector<std::string> domains() const;

private:
    std::map<std::string, DomainDescriptor> domains_;
};

// Flat key=value configuration. '#' starts a comment, blank lines are
// ignored. After parsing, any key has its value replaced by the environment
// variable VPKI_<KEY> (uppercased, non-alphanumerics mapped to '_') when
// that variable is set.
std::map<std::string, std::string> load_config(const std::string& path);
std::map<std::string, std::string> parse_config(const std::string& text);
void apply_env_overrides(std::map<std::string, std::string>& config);

// Builds a registry from config keys of the form
//   domain.<name>.ltca.id / .endpoint / .certificate (base64url bytes)
//   domain.<name>.pca.<k>.id / .endpoint / .certificate / .tau_p / .gamma
//   domain.<name>.epoch
std::vector<DomainDescriptor> domains_from_config(
    const std::map<std::string, std::string>& config);

// Offline root-of-trust step: the root key signs a CA certificate.
LongTermCertificate rca_certify(const KeyPair& rca_key,
                                const std::string& issuer_id,
                                const Bytes& ca_public_key,
                                uint64_t valid_from, uint64_t valid_to);

}  // namespace vpki::gateway

#endif
