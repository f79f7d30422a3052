#ifndef VPKI_HARNESS_LOAD_HPP
#define VPKI_HARNESS_LOAD_HPP

#include <memory>
#include <optional>
#include <vector>

#include "vpki/harness/controller.hpp"
#include "vpki/harness/metrics.hpp"
#include "vpki/ltca/ltca.hpp"
#include "vpki/pca/pca.hpp"
#include "vpki/vehicle/client.hpp"

namespace vpki::harness {

struct FlashCrowd {
    size_t extra_vehicles = 0;
    double extra_hatch_rate = 100;  // vehicles per second
    double start_s = 0;             // offset into the run
    std::vector<size_t> batch_sizes;  // falls back to the base sizes if empty
};

struct LoadConfig {
    size_t total_vehicles = 100;
    double hatch_rate = 10;  // vehicles per second
    uint64_t think_min_ms = 1000;
    uint64_t think_max_ms = 5000;
    std::vector<size_t> batch_sizes{100};
    std::optional<FlashCrowd> flash_crowd;
    double duration_s = 10;
    uint64_t seed = 1;
};

struct PlannedRound {
    double think_ms = 0;
    size_t batch = 0;
};

struct VehiclePlan {
    size_t vehicle_id = 0;
    double start_ms = 0;
    std::vector<PlannedRound> rounds;
};

// Derives the full request schedule from (config, seed) alone, so two runs
// with the same config are driven by identical plans.
std::vector<VehiclePlan> build_plan(const LoadConfig& config);

// Hermetic in-process deployment: n replicas of each service sharing one
// Sybil guard and one record store, standing in for a scaled pod set.
class Bench {
public:
    struct Options {
        size_t ltca_replicas = 2;
        size_t pca_replicas = 2;
        uint64_t tau_p = 300;
        uint64_t write_delay_ms = 0;
        std::function<uint64_t()> now_fn;  // protocol clock override
    };

    struct Enrollment {
        KeyPair key;
        LongTermCertificate ltc;
    };

    explicit Bench(const Options& options);

    Enrollment enroll();

    ltca::Ltca& ltca(size_t i) { return *ltcas_[i]; }
    pca::Pca& pca(size_t i) { return *pcas_[i]; }
    size_t ltca_count() const { return ltcas_.size(); }
    size_t pca_count() const { return pcas_.size(); }

    vehicle::CaEndpoint pca_endpoint() const;
    const std::string& pca_id() const;
    uint64_t tau_p() const { return options_.tau_p; }
    // The protocol clock the services run on.
    uint64_t now() const;

    guard::InMemoryGuard& guard() { return guard_; }
    store::RecordStore& records() { return *records_; }

private:
    Options options_;
    KeyPair rca_key_;
    KeyPair ltca_key_;
    KeyPair pca_key_;
    CaIdentity ltca_id_;
    CaIdentity pca_id_;
    guard::InMemoryGuard guard_;
    std::unique_ptr<store::RecordStore> records_;
    std::vector<std::unique_ptr<ltca::Ltca>> ltcas_;
    std::vector<std::unique_ptr<pca::Pca>> pcas_;
};

// Spawns a virtual vehicle per plan entry, each looping think, ticket,
// pseudonym batch against the bench replicas until the configured duration
// elapses. When a policy is given, a control thread feeds a busy-fraction
// gauge into a ScalingController and resizes the set of replicas in use;
// the report then carries the replica timeline.
LatencyReport run_load(const LoadConfig& config, Bench& bench,
                       const ScalePolicy* policy = nullptr);

enum class RaceMode { Ticket, Pseudonym };

struct RaceOutcome {
    size_t granted = 0;
    size_t denied = 0;
    size_t failed = 0;
};

// Fires k simultaneous identical requests from one vehicle, spread across
// the bench replicas. Ticket mode races overlapping ticket requests;
// pseudonym mode races k uses of a single ticket.
RaceOutcome sybil_race(Bench& bench, size_t k, RaceMode mode);

}  // namespace vpki::harness

#endif
