// Offline trust-root utility: generates CA keypairs and signs CA
// certificates so services and directories can be bootstrapped.
#include <ctime>
#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"
#include "vpki/core/crypto.hpp"
#include "vpki/core/types.hpp"
#include "vpki/gateway/discovery.hpp"

using namespace vpki;

int main(int argc, char** argv) {
    CLI::App app{"trust-root utility"};
    app.require_subcommand(1);

    std::string key_out;
    auto* keygen = app.add_subcommand("keygen", "generate a P-256 keypair");
    keygen->add_option("--out", key_out, "private key file")->required();

    std::string signer_key, subject_key_file, issuer_id, cert_out;
    uint64_t valid_from = 0;
    uint64_t valid_to = 0;
    auto* certify =
        app.add_subcommand("certify", "sign a CA or anchor certificate");
    certify->add_option("--signer-key", signer_key,
                        "signing (root or cross-signing CA) private key")
        ->required();
    certify->add_option("--issuer-id", issuer_id, "issuer identifier")
        ->required();
    certify
        ->add_option("--subject-key", subject_key_file,
                     "subject private or public key file")
        ->required();
    certify->add_option("--out", cert_out, "certificate file")->required();
    certify->add_option("--valid-from", valid_from, "UTC seconds, default 0");
    certify->add_option("--valid-to", valid_to,
                        "UTC seconds, default now + 10 years");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen) {
            auto key = KeyPair::generate();
            tools::write_bytes_file(key_out, key.private_bytes());
            std::cout << "public " << base64url_encode(key.public_bytes())
                      << "\n";
            return 0;
        }

        auto signer =
            KeyPair::from_private(tools::read_bytes_file(signer_key));
        Bytes subject = tools::read_bytes_file(subject_key_file);
        if (subject.size() == 32) {
            subject = KeyPair::from_private(subject).public_bytes();
        }
        if (valid_to == 0) {
            valid_to =
                static_cast<uint64_t>(std::time(nullptr)) + 10ull * 365 * 86400;
        }
        auto cert = gateway::rca_certify(signer, issuer_id, subject,
                                         valid_from, valid_to);
        tools::write_bytes_file(cert_out, cert.to_bytes());
        std::cout << "certified " << base64url_encode(cert.serial) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
