// Load-testing CLI over the in-process bench: seeded load runs emitting
// JSON, CSV and a gnuplot-ready CDF table, plus the duplicate-request race.
#include <iostream>

#include <CLI11.hpp>

#include "common.hpp"
#include "vpki/gateway/discovery.hpp"
#include "vpki/harness/load.hpp"

using namespace vpki;
using namespace vpki::harness;

namespace {

uint64_t get_u64(const std::map<std::string, std::string>& cfg,
                 const std::string& key, uint64_t fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stoull(it->second);
}

double get_double(const std::map<std::string, std::string>& cfg,
                  const std::string& key, double fallback) {
    auto it = cfg.find(key);
    return it == cfg.end() ? fallback : std::stod(it->second);
}

std::vector<size_t> parse_sizes(const std::string& csv) {
    std::vector<size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoull(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"issuance load harness"};
    app.require_subcommand(1);

    std::string config_path, out_path = "report.json";
    uint64_t seed = 1;
    auto* run = app.add_subcommand("run", "seeded load run against a bench");
    run->add_option("--config", config_path, "key=value load config")
        ->required();
    run->add_option("--seed", seed, "schedule seed");
    run->add_option("--out", out_path, "report path (.csv and .cdf are "
                                       "written alongside)");

    size_t k = 64;
    std::string mode = "ticket";
    auto* race = app.add_subcommand("race", "duplicate-request race");
    race->add_option("--k", k, "simultaneous requests");
    race->add_option("--mode", mode, "ticket or pseudonym")
        ->check(CLI::IsMember({"ticket", "pseudonym"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*race) {
            Bench bench({.ltca_replicas = 4, .pca_replicas = 4});
            auto out = sybil_race(
                bench, k,
                mode == "ticket" ? RaceMode::Ticket : RaceMode::Pseudonym);
            std::cout << "granted " << out.granted << ", denied " << out.denied
                      << ", failed " << out.failed << "\n";
            return out.granted == 1 && out.failed == 0 ? 0 : 1;
        }

        auto cfg = gateway::load_config(config_path);
        LoadConfig lc;
        lc.total_vehicles = get_u64(cfg, "vehicles", 100);
        lc.hatch_rate = get_double(cfg, "hatch_rate", 10);
        lc.think_min_ms = get_u64(cfg, "think_min_ms", 1000);
        lc.think_max_ms = get_u64(cfg, "think_max_ms", 5000);
        if (cfg.count("batch_sizes")) {
            lc.batch_sizes = parse_sizes(cfg.at("batch_sizes"));
        }
        lc.duration_s = get_double(cfg, "duration_s", 10);
        lc.seed = seed;
        if (cfg.count("flash.extra_vehicles")) {
            FlashCrowd fc;
            fc.extra_vehicles = get_u64(cfg, "flash.extra_vehicles", 0);
            fc.extra_hatch_rate = get_double(cfg, "flash.hatch_rate", 100);
            fc.start_s = get_double(cfg, "flash.start_s", 0);
            if (cfg.count("flash.batch_sizes")) {
                fc.batch_sizes = parse_sizes(cfg.at("flash.batch_sizes"));
            }
            lc.flash_crowd = fc;
        }

        Bench bench({.ltca_replicas = get_u64(cfg, "ltca_replicas", 2),
                     .pca_replicas = get_u64(cfg, "pca_replicas", 2),
                     .tau_p = get_u64(cfg, "tau_p", 300),
                     .write_delay_ms = get_u64(cfg, "write_delay_ms", 0)});

        std::optional<ScalePolicy> policy;
        if (cfg.count("scale.max_replicas")) {
            policy = ScalePolicy{};
            policy->min_replicas = get_u64(cfg, "scale.min_replicas", 1);
            policy->max_replicas = get_u64(cfg, "scale.max_replicas", 8);
            policy->target_utilization = get_double(cfg, "scale.target", 0.6);
            policy->tick_ms = get_u64(cfg, "scale.tick_ms", 5000);
        }

        auto report =
            run_load(lc, bench, policy ? &*policy : nullptr);
        tools::spit(out_path, report.to_json() + "\n");
        auto stem = out_path.substr(0, out_path.rfind('.') == std::string::npos
                                           ? out_path.size()
                                           : out_path.rfind('.'));
        tools::spit(stem + ".csv", report.to_csv());
        tools::spit(stem + ".cdf", report.cdf_table());
        std::cout << "samples " << report.samples.size() << ", granted "
                  << report.granted << ", denied " << report.denied
                  << ", failed " << report.failed << "\n"
                  << "p50 " << report.overall.p50 << " ms, p99 "
                  << report.overall.p99 << " ms, p99.9 "
                  << report.overall.p999 << " ms\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
