#include "vpki/harness/load.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <random>
#include <thread>

#include "vpki/gateway/discovery.hpp"
#include "vpki/gateway/gauge.hpp"

namespace vpki::harness {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0)
        .count();
}

std::string outcome_of(Err code) {
    switch (code) {
        case Err::SybilDenied:
        case Err::TicketReused:
        case Err::ReusedForeignTicket:
            return "denied";
        default:
            return "failed";
    }
}

std::vector<PlannedRound> draw_rounds(std::mt19937_64& rng,
                                      const LoadConfig& cfg,
                                      const std::vector<size_t>& batches) {
    std::uniform_int_distribution<uint64_t> think(cfg.think_min_ms,
                                                  cfg.think_max_ms);
    std::uniform_int_distribution<size_t> pick(0, batches.size() - 1);
    // Enough rounds that the schedule, not the plan length, ends the run.
    size_t n = cfg.think_min_ms == 0
                   ? 64
                   : static_cast<size_t>(cfg.duration_s * 1000.0 /
                                         static_cast<double>(cfg.think_min_ms)) +
                         2;
    if (n > 100000) n = 100000;
    std::vector<PlannedRound> rounds;
    rounds.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        rounds.push_back({static_cast<double>(think(rng)),
                          batches[pick(rng)]});
    }
    return rounds;
}

std::mt19937_64 vehicle_rng(uint64_t seed, size_t vehicle_id) {
    std::seed_seq seq{static_cast<uint32_t>(seed),
                      static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(vehicle_id)};
    return std::mt19937_64(seq);
}

}  // namespace

std::vector<VehiclePlan> build_plan(const LoadConfig& config) {
    if (config.hatch_rate <= 0 || config.batch_sizes.empty() ||
        config.think_min_ms > config.think_max_ms) {
        throw std::invalid_argument("bad load config");
    }
    std::vector<VehiclePlan> plans;
    plans.reserve(config.total_vehicles);
    for (size_t id = 0; id < config.total_vehicles; ++id) {
        auto rng = vehicle_rng(config.seed, id);
        VehiclePlan p;
        p.vehicle_id = id;
        p.start_ms = static_cast<double>(id) / config.hatch_rate * 1000.0;
        p.rounds = draw_rounds(rng, config, config.batch_sizes);
        plans.push_back(std::move(p));
    }
    if (config.flash_crowd) {
        const auto& fc = *config.flash_crowd;
        const auto& batches =
            fc.batch_sizes.empty() ? config.batch_sizes : fc.batch_sizes;
        for (size_t i = 0; i < fc.extra_vehicles; ++i) {
            size_t id = config.total_vehicles + i;
            auto rng = vehicle_rng(config.seed, id);
            VehiclePlan p;
            p.vehicle_id = id;
            p.start_ms = fc.start_s * 1000.0 +
                         static_cast<double>(i) / fc.extra_hatch_rate * 1000.0;
            p.rounds = draw_rounds(rng, config, batches);
            plans.push_back(std::move(p));
        }
    }
    return plans;
}

Bench::Bench(const Options& options)
    : options_(options),
      rca_key_(KeyPair::generate()),
      ltca_key_(KeyPair::generate()),
      pca_key_(KeyPair::generate()) {
    uint64_t horizon = now() + 10ull * 365 * 86400;
    ltca_id_.id = "ltca-bench";
    ltca_id_.certificate = gateway::rca_certify(
        rca_key_, "rca-bench", ltca_key_.public_bytes(), 0, horizon);
    pca_id_.id = "pca-bench";
    pca_id_.certificate = gateway::rca_certify(
        rca_key_, "rca-bench", pca_key_.public_bytes(), 0, horizon);

    store::StoreOptions so;
    so.write_delay_ms = options_.write_delay_ms;
    records_ = std::make_unique<store::RecordStore>(so);

    ltca::LtcaConfig lc;
    lc.now_fn = options_.now_fn;
    pca::PcaConfig pc;
    pc.tau_p_s = options_.tau_p;
    pc.now_fn = options_.now_fn;
    for (size_t i = 0; i < options_.ltca_replicas; ++i) {
        ltcas_.push_back(std::make_unique<ltca::Ltca>(ltca_id_, ltca_key_,
                                                      guard_, *records_, lc));
    }
    for (size_t i = 0; i < options_.pca_replicas; ++i) {
        auto p = std::make_unique<pca::Pca>(pca_id_, pca_key_, guard_,
                                            *records_, pc);
        p->add_trusted_ltca(ltca_id_);
        pcas_.push_back(std::move(p));
    }
}

uint64_t Bench::now() const {
    if (options_.now_fn) return options_.now_fn();
    return static_cast<uint64_t>(std::time(nullptr));
}

Bench::Enrollment Bench::enroll() {
    KeyPair key = KeyPair::generate();
    auto out =
        ltcas_[0]->register_vehicle(key.public_bytes(), 0, now() + 86400 * 365);
    if (!out.ok()) {
        throw std::runtime_error("bench enrollment failed: " +
                                 out.error().detail);
    }
    for (size_t i = 1; i < ltcas_.size(); ++i) {
        ltcas_[i]->adopt_registration(out.value());
    }
    return {key, out.value()};
}

vehicle::CaEndpoint Bench::pca_endpoint() const {
    return {pca_id_.id, pca_key_.public_bytes(), options_.tau_p};
}

const std::string& Bench::pca_id() const { return pca_id_.id; }

LatencyReport run_load(const LoadConfig& config, Bench& bench,
                       const ScalePolicy* policy) {
    auto plans = build_plan(config);
    Recorder recorder;
    const double duration_ms = config.duration_s * 1000.0;
    const auto t0 = Clock::now();
    auto now_ms = [t0] { return static_cast<uint64_t>(elapsed_ms(t0)); };
    gateway::LoadGauge gauge(now_ms);

    size_t pool = std::min(bench.ltca_count(), bench.pca_count());
    std::atomic<size_t> active{policy ? std::min(policy->min_replicas, pool)
                                      : pool};
    std::atomic<size_t> rr{0};
    std::atomic<bool> done{false};

    std::vector<std::pair<double, size_t>> replica_timeline;
    std::thread controller_thread;
    if (policy) {
        controller_thread = std::thread([&] {
            ScalingController ctrl(*policy);
            while (!done.load()) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(policy->tick_ms));
                size_t n = ctrl.on_tick(gauge.utilization());
                active.store(std::min(n, pool));
                replica_timeline.emplace_back(elapsed_ms(t0), n);
            }
        });
    }

    auto drive = [&](const VehiclePlan& plan) {
        if (plan.start_ms >= duration_ms) return;
        std::this_thread::sleep_until(
            t0 + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double, std::milli>(plan.start_ms)));
        auto enrolled = bench.enroll();
        vehicle::ClientConfig ccfg;
        ccfg.now_fn = [&bench] { return bench.now(); };
        vehicle::Client obu(enrolled.key, enrolled.ltc, ccfg);
        uint64_t next_ts = bench.now();
        auto ep = bench.pca_endpoint();

        for (const auto& round : plan.rounds) {
            std::this_thread::sleep_for(
                std::chrono::duration<double, std::milli>(round.think_ms));
            if (elapsed_ms(t0) >= duration_ms) break;

            uint64_t slot0 = pca::align_up(next_ts, bench.tau_p());
            uint64_t t_e = slot0 + round.batch * bench.tau_p();
            auto [treq, rnd_tkt] =
                obu.build_ticket_request(bench.pca_id(), next_ts, t_e);
            next_ts = t_e;

            size_t i = rr.fetch_add(1) % std::max<size_t>(1, active.load());
            double submit = elapsed_ms(t0);
            gauge.op_started();
            auto tresp = bench.ltca(i % bench.ltca_count()).issue_ticket(treq);
            double lat = elapsed_ms(t0) - submit;
            gauge.op_finished(static_cast<uint64_t>(lat));
            recorder.add({"ticket", submit, lat,
                          tresp.ok() ? "granted"
                                     : outcome_of(tresp.error().code)});
            if (!tresp.ok()) continue;

            size_t j = rr.fetch_add(1) % std::max<size_t>(1, active.load());
            submit = elapsed_ms(t0);
            gauge.op_started();
            auto batch = obu.acquire_pseudonyms(
                ep, tresp.value(), rnd_tkt, round.batch,
                [&](const pca::PseudonymRequest& r) {
                    return bench.pca(j % bench.pca_count())
                        .issue_pseudonyms(r);
                });
            lat = elapsed_ms(t0) - submit;
            gauge.op_finished(static_cast<uint64_t>(lat));
            recorder.add({"pseudonyms", submit, lat,
                          batch.ok() ? "granted"
                                     : outcome_of(batch.error().code)});
        }
    };

    std::vector<std::thread> vehicles;
    vehicles.reserve(plans.size());
    for (const auto& plan : plans) {
        vehicles.emplace_back(drive, std::cref(plan));
    }
    for (auto& t : vehicles) t.join();
    done.store(true);
    if (controller_thread.joinable()) controller_thread.join();

    return LatencyReport::build(recorder.take(), std::move(replica_timeline));
}

RaceOutcome sybil_race(Bench& bench, size_t k, RaceMode mode) {
    if (k == 0) return {};
    auto enrolled = bench.enroll();
    vehicle::ClientConfig ccfg;
    ccfg.now_fn = [&bench] { return bench.now(); };
    RaceOutcome out;
    std::mutex mu;
    std::barrier gate(static_cast<ptrdiff_t>(k));
    auto tally = [&](bool ok, Err code) {
        std::lock_guard lock(mu);
        if (ok) {
            out.granted++;
        } else if (outcome_of(code) == "denied") {
            out.denied++;
        } else {
            out.failed++;
        }
    };

    uint64_t t_s = bench.now();
    uint64_t slot0 = pca::align_up(t_s, bench.tau_p());
    uint64_t t_e = slot0 + 2 * bench.tau_p();

    std::vector<std::thread> threads;
    threads.reserve(k);

    if (mode == RaceMode::Ticket) {
        for (size_t i = 0; i < k; ++i) {
            threads.emplace_back([&, i] {
                vehicle::Client obu(enrolled.key, enrolled.ltc, ccfg);
                auto [req, rnd] =
                    obu.build_ticket_request(bench.pca_id(), t_s, t_e);
                gate.arrive_and_wait();
                auto res =
                    bench.ltca(i % bench.ltca_count()).issue_ticket(req);
                tally(res.ok(), res.ok() ? Err::BadRequest : res.error().code);
            });
        }
        for (auto& t : threads) t.join();
        return out;
    }

    // Pseudonym mode: one ticket, raced k times. The setup state must stay
    // alive until the threads join.
    vehicle::Client setup(enrolled.key, enrolled.ltc, ccfg);
    auto [treq, rnd_tkt_bound] =
        setup.build_ticket_request(bench.pca_id(), t_s, t_e);
    Bytes rnd_tkt = rnd_tkt_bound;
    auto tresp = bench.ltca(0).issue_ticket(treq);
    if (!tresp.ok()) {
        throw std::runtime_error("race setup ticket denied");
    }
    auto ep = bench.pca_endpoint();
    for (size_t i = 0; i < k; ++i) {
        threads.emplace_back([&, i] {
            vehicle::Client obu(enrolled.key, enrolled.ltc, ccfg);
            gate.arrive_and_wait();
            auto res = obu.acquire_pseudonyms(
                ep, tresp.value(), rnd_tkt, 2,
                [&](const pca::PseudonymRequest& r) {
                    return bench.pca(i % bench.pca_count())
                        .issue_pseudonyms(r);
                });
            tally(res.ok(), res.ok() ? Err::BadRequest : res.error().code);
        });
    }
    for (auto& t : threads) t.join();
    return out;
}

}  // namespace vpki::harness
