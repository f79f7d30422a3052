// On-board-unit CLI: registers with an LTCA, acquires tickets and pseudonym
// batches, and runs a trip loop that refills the pool as coverage drains.
// All long-lived state (keys, LTC, pending ticket, pool) lives in a JSON
// state file so each invocation is self-contained.
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"
#include "vpki/gateway/http.hpp"
#include "vpki/vehicle/client.hpp"

using namespace vpki;
using nlohmann::json;

namespace {

uint64_t now_s() { return static_cast<uint64_t>(std::time(nullptr)); }

json load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) return json::object();
    json j;
    in >> j;
    return j;
}

void save_state(const std::string& path, const json& j) {
    tools::spit(path, j.dump(2) + "\n");
}

KeyPair state_key(json& st) {
    if (!st.contains("private_key")) {
        auto key = KeyPair::generate();
        st["private_key"] = base64url_encode(key.private_bytes());
        return key;
    }
    return KeyPair::from_private(
        base64url_decode(st["private_key"].get<std::string>()));
}

vehicle::Client make_client(json& st) {
    auto key = state_key(st);
    if (!st.contains("ltc")) throw std::runtime_error("not registered yet");
    auto ltc = LongTermCertificate::from_bytes(
        base64url_decode(st["ltc"].get<std::string>()));
    return vehicle::Client(key, ltc, {});
}

gateway::HttpClient client_for(const std::string& endpoint) {
    auto [host, port] = tools::split_endpoint(endpoint);
    return gateway::HttpClient(host, port);
}

// Looks the domain up in the directory and fails on unknown names.
gateway::DomainDescriptor discover(const std::string& directory,
                                   const std::string& domain) {
    auto dir = client_for(directory);
    auto found = dir.discover(domain);
    if (!found.ok()) {
        throw std::runtime_error("discovery failed: " + found.error().detail);
    }
    return found.value();
}

void store_pool(json& st, const std::vector<vehicle::PoolEntry>& pool) {
    json arr = json::array();
    for (const auto& e : pool) {
        arr.push_back({{"pseudonym", base64url_encode(e.pseudonym.to_bytes())},
                       {"private_key", base64url_encode(e.private_key)}});
    }
    st["pool"] = arr;
}

int acquire_batch(json& st, const gateway::DomainDescriptor& dom, size_t n) {
    if (!st.contains("ticket")) {
        throw std::runtime_error("no pending ticket; run `vehicle ticket`");
    }
    auto obu = make_client(st);
    const auto& pd = dom.pcas.at(0);
    ltca::TicketResponse tresp;
    tresp.ticket = Ticket::from_bytes(
        base64url_decode(st["ticket"]["ticket"].get<std::string>()));
    tresp.rnd_ik_tkt =
        base64url_decode(st["ticket"]["rnd_ik_tkt"].get<std::string>());
    Bytes rnd_tkt = base64url_decode(st["ticket"]["rnd_tkt"].get<std::string>());

    vehicle::CaEndpoint ep{pd.id, pd.certificate.subject_public_key, pd.tau_p};
    auto pca = client_for(pd.endpoint);
    auto out = obu.acquire_pseudonyms(
        ep, tresp, rnd_tkt, n,
        [&](const pca::PseudonymRequest& r) { return pca.issue_pseudonyms(r); });
    if (!out.ok()) {
        std::cerr << "acquisition failed: " << err_name(out.error().code)
                  << " " << out.error().detail << "\n";
        return 1;
    }
    st.erase("ticket");  // single use, spent now
    store_pool(st, obu.pool());
    std::cout << "pool holds " << obu.pool().size() << " pseudonyms\n";
    return 0;
}

int request_ticket(json& st, const gateway::DomainDescriptor& dom,
                   uint64_t t_s, uint64_t t_e) {
    auto obu = make_client(st);
    const auto& pd = dom.pcas.at(0);
    auto [req, rnd_tkt] = obu.build_ticket_request(pd.id, t_s, t_e);
    auto ltca = client_for(dom.ltca_endpoint);
    auto out = ltca.issue_ticket(req);
    if (!out.ok()) {
        std::cerr << "ticket denied: " << err_name(out.error().code) << " "
                  << out.error().detail << "\n";
        return 1;
    }
    st["ticket"] = {
        {"ticket", base64url_encode(out.value().ticket.to_bytes())},
        {"rnd_ik_tkt", base64url_encode(out.value().rnd_ik_tkt)},
        {"rnd_tkt", base64url_encode(rnd_tkt)}};
    std::cout << "ticket covers [" << out.value().ticket.t_s << ", "
              << out.value().ticket.t_e << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vehicle on-board client"};
    app.require_subcommand(1);

    std::string state_path = "vehicle.json";
    std::string directory, domain;
    app.add_option("--state", state_path, "JSON state file");
    app.add_option("--directory", directory, "directory endpoint")->required();
    app.add_option("--domain", domain, "domain to operate in")->required();

    auto* reg = app.add_subcommand("register", "enroll with the domain LTCA");

    uint64_t t_s = 0, t_e = 0;
    auto* tkt = app.add_subcommand("ticket", "request an authorization ticket");
    tkt->add_option("--t-s", t_s, "coverage start, default now");
    tkt->add_option("--t-e", t_e, "coverage end, default start + 100 lifetimes");

    size_t count = 100;
    auto* pseu = app.add_subcommand("pseudonyms", "redeem the pending ticket");
    pseu->add_option("--n", count, "batch size");

    uint64_t trip_s = 600;
    size_t trip_batch = 10;
    auto* trip = app.add_subcommand("trip", "keep the pool filled for a trip");
    trip->add_option("--duration", trip_s, "trip length in seconds");
    trip->add_option("--n", trip_batch, "batch size per refill");

    CLI11_PARSE(app, argc, argv);

    try {
        json st = load_state(state_path);
        auto dom = discover(directory, domain);

        int rc = 0;
        if (*reg) {
            auto key = state_key(st);
            auto ltca = client_for(dom.ltca_endpoint);
            auto out = ltca.register_vehicle(key.public_bytes(), now_s() - 60,
                                             now_s() + 3ull * 365 * 86400);
            if (!out.ok()) {
                std::cerr << "registration failed: "
                          << err_name(out.error().code) << "\n";
                rc = 1;
            } else {
                st["ltc"] = base64url_encode(out.value().to_bytes());
                std::cout << "registered\n";
            }
        } else if (*tkt) {
            uint64_t tau = dom.pcas.at(0).tau_p;
            if (t_s == 0) t_s = now_s();
            if (t_e == 0) t_e = t_s + 100 * tau;
            rc = request_ticket(st, dom, t_s, t_e);
        } else if (*pseu) {
            rc = acquire_batch(st, dom, count);
        } else if (*trip) {
            uint64_t tau = dom.pcas.at(0).tau_p;
            uint64_t end = now_s() + trip_s;
            while (now_s() < end && rc == 0) {
                json probe = st;  // pool as persisted so far
                auto obu = make_client(st);
                std::vector<vehicle::PoolEntry> pool;
                for (const auto& e : st.value("pool", json::array())) {
                    pool.push_back(
                        {Pseudonym::from_bytes(base64url_decode(
                             e["pseudonym"].get<std::string>())),
                         base64url_decode(e["private_key"].get<std::string>())});
                }
                if (vehicle::Client::refill_needed(pool, now_s(),
                                                   end - now_s(), tau)) {
                    uint64_t from = now_s();
                    for (const auto& e : pool) {
                        from = std::max(from, e.pseudonym.t_e);
                    }
                    rc = request_ticket(st, dom, from, from + trip_batch * tau);
                    if (rc == 0) rc = acquire_batch(st, dom, trip_batch);
                } else {
                    std::this_thread::sleep_for(std::chrono::seconds(1));
                }
            }
        }
        save_state(state_path, st);
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
