// Service daemon: hosts one LTCA, PCA, RA, directory or guard instance over
// HTTP, wired from a key=value config file (VPKI_* env vars override keys).
// The purge subcommand compacts a record-store file offline.
#include <csignal>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "common.hpp"
#include "vpki/gateway/discovery.hpp"
#include "vpki/gateway/http.hpp"
#include "vpki/guard/remote.hpp"
#include "vpki/ltca/ltca.hpp"
#include "vpki/pca/pca.hpp"
#include "vpki/ra/ra.hpp"
#include "vpki/store/record_store.hpp"

using namespace vpki;
using Config = std::map<std::string, std::string>;

namespace {

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

std::string get_or(const Config& cfg, const std::string& key,
                   const std::string& fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

uint64_t get_u64(const Config& cfg, const std::string& key,
                 uint64_t fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stoull(it->second);
}

CaIdentity identity_from(const Config& cfg, const std::string& id_key,
                         const std::string& cert_key) {
    CaIdentity out;
    out.id = cfg.at(id_key);
    out.certificate =
        LongTermCertificate::from_bytes(tools::read_bytes_file(cfg.at(cert_key)));
    return out;
}

// Indexed entries like trust.1.id / trust.1.certificate, 1-based, dense.
std::vector<Config> indexed(const Config& cfg, const std::string& prefix) {
    std::vector<Config> out;
    for (size_t k = 1;; ++k) {
        std::string p = prefix + "." + std::to_string(k) + ".";
        Config entry;
        for (const auto& [key, value] : cfg) {
            if (key.rfind(p, 0) == 0) entry[key.substr(p.size())] = value;
        }
        if (entry.empty()) break;
        out.push_back(std::move(entry));
    }
    return out;
}

CaIdentity identity_of(const Config& entry) {
    CaIdentity out;
    out.id = entry.at("id");
    out.certificate = LongTermCertificate::from_bytes(
        tools::read_bytes_file(entry.at("certificate")));
    return out;
}

int serve(const std::string& config_path) {
    auto cfg = gateway::load_config(config_path);
    std::string role = cfg.at("role");
    std::string host = get_or(cfg, "host", "127.0.0.1");
    int port = static_cast<int>(get_u64(cfg, "port", 0));

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    auto wait_forever = [] {
        while (!g_stop) {
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        }
    };

    if (role == "guard") {
        guard::GuardServer server(std::make_shared<guard::InMemoryGuard>(),
                                  static_cast<uint16_t>(port));
        std::cout << "guard listening on " << host << ":" << server.port()
                  << "\n";
        wait_forever();
        return 0;
    }

    if (role == "directory") {
        gateway::Registry registry;
        for (auto& d : gateway::domains_from_config(cfg)) {
            registry.add(std::move(d));
        }
        gateway::HttpServer server;
        server.mount_discovery(registry);
        int bound = server.start(host, port);
        std::cout << "directory listening on " << host << ":" << bound << "\n";
        wait_forever();
        server.stop();
        return 0;
    }

    // The remaining roles are signing services.
    KeyPair key = KeyPair::from_private(tools::read_bytes_file(cfg.at("key")));
    CaIdentity self = identity_from(cfg, "id", "certificate");

    std::unique_ptr<guard::SybilGuard> guard;
    std::string guard_backend = get_or(cfg, "guard", "local");
    if (guard_backend == "local") {
        guard = std::make_unique<guard::InMemoryGuard>();
    } else {
        auto [ghost, gport] = tools::split_endpoint(guard_backend);
        guard = std::make_unique<guard::RemoteGuard>(
            ghost, static_cast<uint16_t>(gport));
    }

    store::StoreOptions so;
    so.path = get_or(cfg, "store", "");
    so.write_delay_ms = get_u64(cfg, "store.write_delay_ms", 0);
    store::RecordStore records(so);

    bool fail_open = get_or(cfg, "guard_policy", "fail-close") == "fail-open";
    gateway::HttpServer server;
    std::unique_ptr<ltca::Ltca> ltca_svc;
    std::unique_ptr<pca::Pca> pca_svc;
    std::unique_ptr<ra::Ra> ra_svc;

    if (role == "ltca") {
        ltca::LtcaConfig lc;
        lc.freshness_window_s = get_u64(cfg, "freshness_window", 300);
        lc.ticket_grace_s = get_u64(cfg, "ticket_grace", 0);
        lc.max_coverage_s = get_u64(cfg, "max_coverage", 7 * 86400);
        lc.fail_open = fail_open;
        ltca_svc = std::make_unique<ltca::Ltca>(self, key, *guard, records, lc);
        for (const auto& entry : indexed(cfg, "trust")) {
            ltca_svc->add_trusted_peer(identity_of(entry));
        }
        server.mount_ltca(*ltca_svc);
    } else if (role == "pca") {
        pca::PcaConfig pc;
        pc.tau_p_s = get_u64(cfg, "tau_p", 300);
        pc.max_batch = get_u64(cfg, "max_batch", 1000);
        pc.freshness_window_s = get_u64(cfg, "freshness_window", 300);
        pc.fail_open = fail_open;
        pca_svc = std::make_unique<pca::Pca>(self, key, *guard, records, pc);
        for (const auto& entry : indexed(cfg, "trust")) {
            pca_svc->add_trusted_ltca(identity_of(entry));
        }
        for (const auto& entry : indexed(cfg, "ra")) {
            pca_svc->add_authorized_ra(identity_of(entry));
        }
        server.mount_pca(*pca_svc);
    } else if (role == "ra") {
        ra::RaConfig rc;
        rc.validations_per_min = get_u64(cfg, "validations_per_min", 10);
        ra_svc = std::make_unique<ra::Ra>(self, key, rc);
        for (const auto& entry : indexed(cfg, "trust")) {
            ra_svc->add_trusted_ltca(identity_of(entry));
        }
        for (const auto& entry : indexed(cfg, "pca")) {
            auto [phost, pport] = tools::split_endpoint(entry.at("endpoint"));
            ra_svc->register_pca(
                identity_of(entry),
                [phost, pport](const pca::ResolveRequest& rr) {
                    gateway::HttpClient c(phost, pport);
                    return c.resolve(rr);
                });
        }
        server.mount_ra(*ra_svc);
    } else {
        std::cerr << "unknown role: " << role << "\n";
        return 1;
    }

    int bound = server.start(host, port);
    std::cout << role << " " << self.id << " listening on " << host << ":"
              << bound << "\n";
    wait_forever();
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credential service daemon"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("serve", "host a service from config");
    run->add_option("--config", config_path, "key=value config file")
        ->required();

    std::string store_path;
    uint64_t cutoff = 0;
    auto* purge =
        app.add_subcommand("purge", "drop expired records and compact");
    purge->add_option("--store", store_path, "record file")->required();
    purge->add_option("--cutoff", cutoff, "UTC seconds; drop records expired before this")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return serve(config_path);
        store::StoreOptions so;
        so.path = store_path;
        store::RecordStore records(so);
        size_t dropped = records.purge_before(cutoff);
        std::cout << "dropped " << dropped << " records, "
                  << records.durable_count() << " kept\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
