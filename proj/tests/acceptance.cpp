// Acceptance gate: ten end-to-end criteria, one pass/fail line each.
// Exits nonzero if any criterion fails. Tolerances are pinned as the
// constants right below so a regression cannot be waved through by editing
// a test expectation in passing.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "vpki/gateway/codec.hpp"
#include "vpki/harness/controller.hpp"
#include "vpki/harness/load.hpp"
#include "vpki/harness/metrics.hpp"

using namespace vpki;

namespace {

// Pinned parameters and tolerances.
constexpr size_t kRaceSeeds = 100;         // repetitions per race criterion
constexpr size_t kRaceK = 64;              // simultaneous requests per race
constexpr double kRaceBudgetS = 30.0;      // wall-clock budget per criterion
constexpr size_t kChainBatches = 1000;     // criterion 3
constexpr size_t kChainMaxN = 500;
constexpr size_t kValidations = 1000;      // criterion 4, each verdict class
constexpr size_t kSequenceRequests = 10000;  // criterion 5
constexpr size_t kSequenceVehicles = 100;
constexpr size_t kSlotBatches = 300;       // criterion 5, slot checks
constexpr size_t kRollbacks = 100;         // criterion 6, per protocol
constexpr uint64_t kAsyncDelayMs = 50;     // criterion 7
constexpr double kAsyncTolerance = 0.10;   // p99 within 10%
constexpr size_t kAsyncSamples = 120;
constexpr size_t kAsyncBatch = 60;
constexpr double kBatch100MeanMsMax = 560; // criterion 8
constexpr double kBatch500Factor = 10.0;
constexpr double kBurstP999Factor = 5.0;   // criterion 9
constexpr size_t kTranscripts = 1000;      // criterion 10

constexpr uint64_t kNow = 1700000000;
constexpr uint64_t kTau = 300;

uint64_t fixed_now() { return kNow; }

bool g_all_pass = true;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

// In-process LTCA + PCA + RA sharing one guard and store, protocol clock
// pinned to kNow.
struct Stack {
    KeyPair rca_key = KeyPair::generate();
    KeyPair ltca_key = KeyPair::generate();
    KeyPair pca_key = KeyPair::generate();
    KeyPair ra_key = KeyPair::generate();
    CaIdentity ltca_id, pca_id, ra_id;

    guard::InMemoryGuard guard;
    store::RecordStore records;
    ltca::Ltca ltca;
    pca::Pca pca;
    ra::Ra ra;

    static CaIdentity make_ca(const std::string& id, const KeyPair& key,
                              const KeyPair& rca) {
        CaIdentity ca;
        ca.id = id;
        ca.certificate.serial = gen_rnd(kSerialLen);
        ca.certificate.subject_public_key = key.public_bytes();
        ca.certificate.issuer_id = "rca";
        ca.certificate.valid_from = 0;
        ca.certificate.valid_to = kNow + 10ull * 365 * 86400;
        ca.certificate.signature = rca.sign(ca.certificate.tbs_bytes());
        return ca;
    }

    explicit Stack(const std::string& pca_name = "pca-1",
                   uint64_t write_delay_ms = 0)
        : ltca_id(make_ca("issuer-home", ltca_key, rca_key)),
          pca_id(make_ca(pca_name, pca_key, rca_key)),
          ra_id(make_ca("resolver-1", ra_key, rca_key)),
          records(store::StoreOptions{.write_delay_ms = write_delay_ms}),
          ltca(ltca_id, ltca_key, guard, records, {.now_fn = fixed_now}),
          pca(pca_id, pca_key, guard, records,
              {.tau_p_s = kTau, .now_fn = fixed_now}),
          ra(ra_id, ra_key, {.validations_per_min = 1u << 30,
                             .now_fn = fixed_now}) {
        pca.add_trusted_ltca(ltca_id);
        pca.add_authorized_ra(ra_id);
        ra.add_trusted_ltca(ltca_id);
        ra.register_pca(pca_id, [this](const pca::ResolveRequest& rr) {
            return pca.resolve_pseudonym(rr);
        });
    }

    struct Vehicle {
        KeyPair key;
        LongTermCertificate ltc;
    };

    Vehicle enroll() {
        KeyPair key = KeyPair::generate();
        auto out =
            ltca.register_vehicle(key.public_bytes(), 0, kNow + 365 * 86400);
        if (!out.ok()) throw std::runtime_error("enroll failed");
        return {key, out.value()};
    }

    ltca::TicketRequest ticket_request(const Vehicle& v, const Bytes& rnd_tkt,
                                       uint64_t t_s, uint64_t t_e) {
        ltca::TicketRequest req;
        req.id_req = "veh";
        req.target_hash = hash_fields({to_bytes(pca_id.id), rnd_tkt});
        req.t_s = t_s;
        req.t_e = t_e;
        req.nonce = 1;
        req.t_now = kNow;
        req.ltc = v.ltc;
        req.signature = v.key.sign(req.signed_payload());
        return req;
    }

    pca::PseudonymRequest pseudonym_request(const Bytes& rnd_tkt,
                                            const Bytes& ticket_bytes,
                                            size_t n) {
        pca::PseudonymRequest preq;
        preq.id_req = "veh";
        preq.rnd_n_tkt = rnd_tkt;
        preq.ticket_bytes = ticket_bytes;
        for (size_t i = 0; i < n; ++i) {
            KeyPair k = KeyPair::generate();
            pca::Csr c;
            c.public_key = k.public_bytes();
            c.signature = k.sign(c.signed_payload());
            preq.csrs.push_back(std::move(c));
        }
        preq.nonce = 2;
        preq.t_now = kNow;
        return preq;
    }

    // Ticket and batch in one go; windows must not overlap per vehicle.
    pca::PseudonymResponse issue_batch(const Vehicle& v, uint64_t t_s,
                                       size_t n) {
        Bytes rnd_tkt = gen_rnd();
        uint64_t slot0 = pca::align_up(t_s, kTau);
        auto tout =
            ltca.issue_ticket(ticket_request(v, rnd_tkt, t_s, slot0 + n * kTau));
        if (!tout.ok()) throw std::runtime_error("ticket denied in setup");
        auto pout = pca.issue_pseudonyms(pseudonym_request(
            rnd_tkt, tout.value().ticket.to_bytes(), n));
        if (!pout.ok()) throw std::runtime_error("batch denied in setup");
        return pout.value();
    }

    ra::ReportEnvelope make_report(const Pseudonym& suspect) {
        KeyPair k = KeyPair::generate();
        Pseudonym rp;
        rp.serial = hash(gen_rnd());
        rp.public_key = k.public_bytes();
        rp.ik_p = hash(gen_rnd());
        rp.t_s = kNow - 100;
        rp.t_e = kNow + 200;
        rp.issuer_id = pca_id.id;
        rp.signature = pca_key.sign(rp.tbs_bytes());
        ra::ReportEnvelope env;
        env.suspicious_pseudonym = suspect.to_bytes();
        env.reporter_pseudonym = rp.to_bytes();
        env.signature = k.sign(env.signed_payload());
        return env;
    }
};

// ---- criterion 1 and 2 ----------------------------------------------------

void race_criterion(int idx, harness::RaceMode mode, const std::string& name) {
    harness::Bench bench({.ltca_replicas = 4, .pca_replicas = 4, .tau_p = kTau});
    auto t0 = std::chrono::steady_clock::now();
    size_t violations = 0;
    for (size_t seed = 0; seed < kRaceSeeds; ++seed) {
        auto out = harness::sybil_race(bench, kRaceK, mode);
        if (out.granted != 1 || out.denied != kRaceK - 1 || out.failed != 0) {
            violations++;
        }
    }
    double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << kRaceSeeds << " rounds of " << kRaceK
           << " concurrent requests on 4 replicas, " << violations
           << " violations, " << secs << " s";
    report(idx, name, violations == 0 && secs < kRaceBudgetS, detail.str());
}

// ---- criterion 3 ----------------------------------------------------------

void chain_oracle_criterion() {
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<size_t> pick_n(1, kChainMaxN);
    size_t mismatches = 0;
    size_t links = 0;
    for (size_t b = 0; b < kChainBatches; ++b) {
        size_t n = pick_n(rng);
        Digest ik_tkt = hash(gen_rnd());
        Bytes rnd_v = gen_rnd();
        uint64_t base = kNow + (rng() % 1000) * kTau;
        std::vector<Bytes> keys;
        std::vector<chain::Slot> slots;
        for (size_t i = 0; i < n; ++i) {
            keys.push_back(gen_rnd(65));  // any byte string keys the hash
            slots.push_back({base + i * kTau, base + (i + 1) * kTau});
        }
        auto computed = chain::compute(ik_tkt, keys, slots, rnd_v);

        // Independent straight-line recomputation of every IK and SN.
        Bytes h(rnd_v.begin(), rnd_v.end());
        Digest prev_sn{};
        for (size_t i = 0; i < n; ++i) {
            Digest hd = hash(h);  // H^{i+1}(rnd_v)
            h = to_bytes(hd);
            Digest ik = hash_fields({to_bytes(ik_tkt), keys[i],
                                     u64be(slots[i].t_s), u64be(slots[i].t_e),
                                     to_bytes(hd)});
            Digest sn = i == 0
                            ? hash_fields({to_bytes(ik), to_bytes(hd)})
                            : hash_fields({to_bytes(prev_sn), to_bytes(hd)});
            prev_sn = sn;
            links++;
            if (computed[i].ik_p != ik || computed[i].serial != sn ||
                computed[i].rnd_ik != hd) {
                mismatches++;
            }
        }
    }
    std::ostringstream detail;
    detail << kChainBatches << " batches, " << links << " links recomputed, "
           << mismatches << " mismatches";
    report(3, "chain oracle bit-exact", mismatches == 0, detail.str());
}

// ---- criterion 4 ----------------------------------------------------------

void validation_criterion() {
    Stack s;
    auto v = s.enroll();
    std::vector<Pseudonym> honest;
    uint64_t t_s = kNow;
    while (honest.size() < kValidations) {
        size_t n = std::min<size_t>(100, kValidations - honest.size());
        auto batch = s.issue_batch(v, t_s, n);
        for (auto& p : batch.pseudonyms) honest.push_back(std::move(p));
        t_s = pca::align_up(t_s, kTau) + n * kTau;
    }

    size_t honest_valid = 0;
    for (const auto& p : honest) {
        auto out = s.ra.validate_issuance(s.make_report(p));
        if (out.ok() && out.value().verdict == ra::Verdict::ValidIssuance) {
            honest_valid++;
        }
    }

    size_t tampered_invalid = 0;
    for (size_t i = 0; i < kValidations; ++i) {
        Pseudonym p = honest[i];
        switch (i % 4) {
            case 0: p.public_key = KeyPair::generate().public_bytes(); break;
            case 1: p.t_s -= kTau; break;
            case 2: p.t_e += kTau; break;
            case 3: p.ik_p = hash(gen_rnd()); break;
        }
        p.signature = s.pca_key.sign(p.tbs_bytes());  // rogue-PCA re-sign
        auto out = s.ra.validate_issuance(s.make_report(p));
        if (out.ok() && out.value().verdict == ra::Verdict::InvalidIssuance) {
            tampered_invalid++;
        }
    }
    std::ostringstream detail;
    detail << honest_valid << "/" << kValidations << " honest valid, "
           << tampered_invalid << "/" << kValidations << " tampers invalid";
    report(4, "validation soundness and completeness",
           honest_valid == kValidations && tampered_invalid == kValidations,
           detail.str());
}

// ---- criterion 5 ----------------------------------------------------------

void sequence_criterion() {
    Stack s;
    std::mt19937_64 rng(505);
    size_t per_vehicle = kSequenceRequests / kSequenceVehicles;
    size_t overlaps = 0;
    size_t granted_total = 0;

    for (size_t vi = 0; vi < kSequenceVehicles; ++vi) {
        auto v = s.enroll();
        std::vector<std::pair<uint64_t, uint64_t>> granted;
        for (size_t r = 0; r < per_vehicle; ++r) {
            uint64_t t_s = kNow + rng() % (48 * 3600);
            uint64_t t_e = t_s + kTau * (1 + rng() % 6);
            Bytes rnd_tkt = gen_rnd();
            auto out = s.ltca.issue_ticket(s.ticket_request(v, rnd_tkt, t_s, t_e));
            if (out.ok()) granted.emplace_back(t_s, t_e);
        }
        granted_total += granted.size();
        for (size_t a = 0; a < granted.size(); ++a) {
            for (size_t b = a + 1; b < granted.size(); ++b) {
                bool disjoint = granted[a].second <= granted[b].first ||
                                granted[b].second <= granted[a].first;
                if (!disjoint) overlaps++;
            }
        }
    }

    // Slot structure across randomly sized batches.
    size_t slot_faults = 0;
    auto slot_vehicle = s.enroll();
    uint64_t t_s = kNow;
    std::mt19937_64 srng(506);
    for (size_t b = 0; b < kSlotBatches; ++b) {
        size_t n = 1 + srng() % 5;
        auto batch = s.issue_batch(slot_vehicle, t_s, n);
        uint64_t expect = pca::align_up(t_s, kTau);
        for (const auto& p : batch.pseudonyms) {
            if (p.t_s % kTau != 0 || p.t_e != p.t_s + kTau ||
                p.t_s != expect) {
                slot_faults++;
            }
            expect = p.t_e;  // exact abutment
        }
        t_s = expect + (srng() % 3) * kTau;  // occasional gap between tickets
    }

    std::ostringstream detail;
    detail << kSequenceRequests << " requests over " << kSequenceVehicles
           << " vehicles, " << granted_total << " granted, " << overlaps
           << " interval overlaps, " << slot_faults << " slot faults across "
           << kSlotBatches << " batches";
    report(5, "non-overlap and slot alignment", overlaps == 0 && slot_faults == 0,
           detail.str());
}

// ---- criterion 6 ----------------------------------------------------------

void rollback_criterion() {
    Stack s;
    size_t ticket_ok = 0;
    for (size_t i = 0; i < kRollbacks; ++i) {
        auto v = s.enroll();
        s.records.flush();
        size_t intervals = s.guard.interval_entries();
        size_t durable = s.records.durable_count();
        Bytes rnd_tkt = gen_rnd();
        auto req = s.ticket_request(v, rnd_tkt, kNow, kNow + 2 * kTau);

        s.ltca.hooks().fail_after_guard = true;
        auto failed = s.ltca.issue_ticket(req);
        s.ltca.hooks().fail_after_guard = false;
        s.records.flush();

        bool residue_free = !failed.ok() &&
                            failed.error().code == Err::InjectedFailure &&
                            s.guard.interval_entries() == intervals &&
                            s.records.durable_count() == durable;
        auto retry = s.ltca.issue_ticket(req);
        if (residue_free && retry.ok()) ticket_ok++;
    }

    size_t batch_ok = 0;
    for (size_t i = 0; i < kRollbacks; ++i) {
        auto v = s.enroll();
        Bytes rnd_tkt = gen_rnd();
        uint64_t slot0 = pca::align_up(kNow, kTau);
        auto tout = s.ltca.issue_ticket(
            s.ticket_request(v, rnd_tkt, kNow, slot0 + 2 * kTau));
        if (!tout.ok()) continue;
        auto preq = s.pseudonym_request(
            rnd_tkt, tout.value().ticket.to_bytes(), 2);

        s.records.flush();
        size_t durable = s.records.durable_count();
        s.pca.hooks().fail_after_guard = true;
        auto failed = s.pca.issue_pseudonyms(preq);
        s.pca.hooks().fail_after_guard = false;
        s.records.flush();

        bool residue_free = !failed.ok() &&
                            failed.error().code == Err::InjectedFailure &&
                            s.records.durable_count() == durable;
        auto retry = s.pca.issue_pseudonyms(preq);
        bool spent_after = !s.pca.issue_pseudonyms(preq).ok();
        if (residue_free && retry.ok() && spent_after) batch_ok++;
    }

    std::ostringstream detail;
    detail << ticket_ok << "/" << kRollbacks << " ticket rollbacks clean, "
           << batch_ok << "/" << kRollbacks << " batch rollbacks clean";
    report(6, "post-grant failure rollback",
           ticket_ok == kRollbacks && batch_ok == kRollbacks, detail.str());
}

// ---- criterion 7 ----------------------------------------------------------

double issuance_p99_ms(uint64_t write_delay_ms) {
    Stack s("pca-1", write_delay_ms);
    auto v = s.enroll();
    std::vector<double> latencies;
    uint64_t t_s = kNow;
    for (size_t i = 0; i < kAsyncSamples; ++i) {
        Bytes rnd_tkt = gen_rnd();
        uint64_t slot0 = pca::align_up(t_s, kTau);
        auto tout = s.ltca.issue_ticket(
            s.ticket_request(v, rnd_tkt, t_s, slot0 + kAsyncBatch * kTau));
        if (!tout.ok()) throw std::runtime_error("setup ticket denied");
        auto preq = s.pseudonym_request(
            rnd_tkt, tout.value().ticket.to_bytes(), kAsyncBatch);
        auto t0 = std::chrono::steady_clock::now();
        auto out = s.pca.issue_pseudonyms(preq);
        double ms = ms_since(t0);
        if (!out.ok()) throw std::runtime_error("setup batch denied");
        if (i >= 10) latencies.push_back(ms);  // warmup excluded
        t_s = slot0 + kAsyncBatch * kTau;
    }
    return harness::percentile(latencies, 0.99);
}

void async_store_criterion() {
    double base = issuance_p99_ms(0);
    double delayed = issuance_p99_ms(kAsyncDelayMs);
    bool pass = delayed <= base * (1.0 + kAsyncTolerance);
    std::ostringstream detail;
    detail << "p99 " << base << " ms without delay, " << delayed
           << " ms with a " << kAsyncDelayMs << " ms durable-write delay";
    report(7, "async store keeps writes off the issuance path", pass,
           detail.str());
}

// ---- criterion 8 ----------------------------------------------------------

double mean_batch_ms(Stack& s, const Stack::Vehicle& v, uint64_t& t_s,
                     size_t batch, size_t reps) {
    double total = 0;
    for (size_t i = 0; i < reps; ++i) {
        Bytes rnd_tkt = gen_rnd();
        uint64_t slot0 = pca::align_up(t_s, kTau);
        auto tout = s.ltca.issue_ticket(
            s.ticket_request(v, rnd_tkt, t_s, slot0 + batch * kTau));
        if (!tout.ok()) throw std::runtime_error("setup ticket denied");
        auto preq = s.pseudonym_request(
            rnd_tkt, tout.value().ticket.to_bytes(), batch);
        auto t0 = std::chrono::steady_clock::now();
        auto out = s.pca.issue_pseudonyms(preq);
        total += ms_since(t0);
        if (!out.ok()) throw std::runtime_error("setup batch denied");
        t_s = slot0 + batch * kTau;
    }
    return total / static_cast<double>(reps);
}

void throughput_criterion() {
    Stack s;
    auto v = s.enroll();
    uint64_t t_s = kNow;
    mean_batch_ms(s, v, t_s, 100, 2);  // warmup
    double mean100 = mean_batch_ms(s, v, t_s, 100, 10);
    double mean500 = mean_batch_ms(s, v, t_s, 500, 4);
    bool pass = mean100 <= kBatch100MeanMsMax &&
                mean500 <= kBatch500Factor * mean100;
    std::ostringstream detail;
    detail << "batch-100 mean " << mean100 << " ms (limit "
           << kBatch100MeanMsMax << "), batch-500 mean " << mean500
           << " ms (limit " << kBatch500Factor * mean100 << ")";
    report(8, "desk-scale throughput sanity", pass, detail.str());
}

// ---- criterion 9 ----------------------------------------------------------

// Deterministic flash-crowd simulation in virtual time: a replica pool with
// a fixed per-request service cost, fed through the same ScalingController
// the live harness uses. 100 base vehicles trickle in, then a burst of 1000
// arrives an order of magnitude faster, then the system goes quiet.
void scaling_criterion() {
    constexpr double kServiceMs = 100;
    constexpr double kTickMs = 250;
    constexpr double kPreEndMs = 25000;    // 100 arrivals at 4/s
    constexpr double kBurstEndMs = 66700;  // 1000 arrivals at 24/s
    constexpr double kEndMs = 80000;
    harness::ScalePolicy policy{.min_replicas = 1,
                                .max_replicas = 4,
                                .target_utilization = 0.6,
                                .tick_ms = static_cast<uint64_t>(kTickMs),
                                .scale_in_ticks = 3};
    harness::ScalingController ctrl(policy);

    std::vector<double> arrivals;
    for (double t = 1; t < kPreEndMs; t += 250) arrivals.push_back(t);
    for (double t = kPreEndMs + 1; t < kBurstEndMs; t += 1000.0 / 24) {
        arrivals.push_back(t);
    }

    std::vector<std::pair<double, size_t>> timeline;
    std::vector<double> pre_lat, burst_lat;
    double backlog = 0;   // queued work in server-milliseconds
    double last = 0;
    size_t c = ctrl.replicas();
    size_t ai = 0;
    for (double tick_end = kTickMs; tick_end <= kEndMs; tick_end += kTickMs) {
        double executed = 0;
        auto drain_to = [&](double t) {
            double d = std::min(backlog, (t - last) * static_cast<double>(c));
            backlog -= d;
            executed += d;
            last = t;
        };
        while (ai < arrivals.size() && arrivals[ai] < tick_end) {
            drain_to(arrivals[ai]);
            double latency =
                backlog / static_cast<double>(c) + kServiceMs;
            (arrivals[ai] < kPreEndMs ? pre_lat : burst_lat).push_back(latency);
            backlog += kServiceMs;
            ai++;
        }
        drain_to(tick_end);
        double util = backlog > 0
                          ? 1.0
                          : executed / (static_cast<double>(c) * kTickMs);
        c = ctrl.on_tick(util);
        timeline.push_back({tick_end, c});
    }

    // Shape: within the burst window the pool grows strictly (ignoring
    // repeats) until the max clamp, and the run ends back at min.
    std::vector<size_t> burst_counts;
    for (const auto& [t, n] : timeline) {
        if (t > kPreEndMs && t <= kBurstEndMs) {
            if (burst_counts.empty() || burst_counts.back() != n) {
                burst_counts.push_back(n);
            }
        }
    }
    bool reached_max = false;
    bool strictly_up = true;
    for (size_t i = 0; i < burst_counts.size() && !reached_max; ++i) {
        if (i > 0 && burst_counts[i] <= burst_counts[i - 1]) strictly_up = false;
        reached_max = burst_counts[i] == policy.max_replicas;
    }
    bool returns_to_min = timeline.back().second == policy.min_replicas;

    double pre_p999 = harness::percentile(pre_lat, 0.999);
    double burst_p999 = harness::percentile(burst_lat, 0.999);
    bool latency_ok = burst_p999 <= kBurstP999Factor * pre_p999;

    std::ostringstream detail;
    detail << "pool 1->" << policy.max_replicas << "->1, reached max "
           << (reached_max ? "yes" : "no") << ", pre p99.9 " << pre_p999
           << " ms, burst p99.9 " << burst_p999 << " ms (limit "
           << kBurstP999Factor * pre_p999 << ")";
    report(9, "flash-crowd scaling shape",
           reached_max && strictly_up && returns_to_min && latency_ok,
           detail.str());
}

// ---- criterion 10 ---------------------------------------------------------

void privacy_criterion() {
    Stack s("pca-priv-1");
    size_t leaks = 0;
    for (size_t i = 0; i < kTranscripts; ++i) {
        auto v = s.enroll();
        Bytes rnd_tkt = gen_rnd();
        uint64_t slot0 = pca::align_up(kNow, kTau);
        auto treq = s.ticket_request(v, rnd_tkt, kNow, slot0 + 2 * kTau);
        auto tout = s.ltca.issue_ticket(treq);
        if (!tout.ok()) throw std::runtime_error("setup ticket denied");
        auto preq = s.pseudonym_request(
            rnd_tkt, tout.value().ticket.to_bytes(), 2);
        auto pout = s.pca.issue_pseudonyms(preq);
        if (!pout.ok()) throw std::runtime_error("setup batch denied");
        auto env = s.make_report(pout.value().pseudonyms[0]);
        auto rout = s.ra.validate_issuance(env);
        if (!rout.ok()) throw std::runtime_error("setup validation failed");

        const Bytes ltc_bytes = v.ltc.to_bytes();
        const Bytes& sn_ltc = v.ltc.serial;
        const std::string sn_b64 = base64url_encode(sn_ltc);
        const std::string ltc_b64 = base64url_encode(ltc_bytes);

        // LTCA leg: JSON wire exactly as the gateway sends it.
        std::string ltca_wire = gateway::to_json(treq).dump() +
                                gateway::to_json(tout.value()).dump();
        bool ltca_leaks = ltca_wire.find(s.pca_id.id) != std::string::npos;

        // PCA leg: JSON wire plus the raw bytes of every field.
        std::string pca_wire = gateway::to_json(preq).dump() +
                               gateway::to_json(pout.value()).dump();
        Bytes pca_raw = preq.ticket_bytes;
        pca_raw.insert(pca_raw.end(), preq.rnd_n_tkt.begin(),
                       preq.rnd_n_tkt.end());
        for (const auto& p : pout.value().pseudonyms) {
            Bytes pb = p.to_bytes();
            pca_raw.insert(pca_raw.end(), pb.begin(), pb.end());
        }
        bool pca_leaks = pca_wire.find(sn_b64) != std::string::npos ||
                         pca_wire.find(ltc_b64) != std::string::npos ||
                         contains_bytes(pca_raw, sn_ltc) ||
                         contains_bytes(pca_raw, ltc_bytes);

        // RA leg: report envelope and validation report.
        std::string ra_wire = gateway::to_json(env).dump() +
                              gateway::to_json(rout.value()).dump();
        Bytes ra_raw = env.suspicious_pseudonym;
        ra_raw.insert(ra_raw.end(), env.reporter_pseudonym.begin(),
                      env.reporter_pseudonym.end());
        const auto& rep = rout.value();
        ra_raw.insert(ra_raw.end(), rep.ticket_serial.begin(),
                      rep.ticket_serial.end());
        auto ik1 = to_bytes(rep.claimed_ik);
        ra_raw.insert(ra_raw.end(), ik1.begin(), ik1.end());
        bool ra_leaks = ra_wire.find(sn_b64) != std::string::npos ||
                        ra_wire.find(ltc_b64) != std::string::npos ||
                        contains_bytes(ra_raw, sn_ltc) ||
                        contains_bytes(ra_raw, ltc_bytes);

        if (ltca_leaks || pca_leaks || ra_leaks) leaks++;
    }
    std::ostringstream detail;
    detail << kTranscripts << " transcripts scanned, " << leaks << " leaks";
    report(10, "transcript privacy byte-scan", leaks == 0, detail.str());
}

}  // namespace

int main() {
    race_criterion(1, harness::RaceMode::Ticket,
                   "duplicate ticket requests excluded");
    race_criterion(2, harness::RaceMode::Pseudonym,
                   "duplicate ticket spends excluded");
    chain_oracle_criterion();
    validation_criterion();
    sequence_criterion();
    rollback_criterion();
    async_store_criterion();
    throughput_criterion();
    scaling_criterion();
    privacy_criterion();
    return g_all_pass ? 0 : 1;
}
