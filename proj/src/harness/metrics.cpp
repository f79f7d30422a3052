#include "vpki/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace vpki::harness {

void Recorder::add(Sample s) {
    std::lock_guard lock(mu_);
    samples_.push_back(std::move(s));
}

std::vector<Sample> Recorder::take() {
    std::lock_guard lock(mu_);
    return std::move(samples_);
}

size_t Recorder::size() const {
    std::lock_guard lock(mu_);
    return samples_.size();
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    size_t rank = static_cast<size_t>(
        std::ceil(p * static_cast<double>(values.size())));
    if (rank == 0) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

Percentiles percentiles_of(const std::vector<double>& values) {
    Percentiles out;
    out.p50 = percentile(values, 0.50);
    out.p90 = percentile(values, 0.90);
    out.p99 = percentile(values, 0.99);
    out.p999 = percentile(values, 0.999);
    return out;
}

LatencyReport LatencyReport::build(
    std::vector<Sample> samples,
    std::vector<std::pair<double, size_t>> replica_timeline) {
    LatencyReport r;
    r.samples = std::move(samples);
    r.replica_timeline = std::move(replica_timeline);

    std::map<std::string, std::vector<double>> per_op;
    std::vector<double> all;
    std::map<uint64_t, size_t> buckets;  // second -> completed requests
    all.reserve(r.samples.size());
    for (const auto& s : r.samples) {
        per_op[s.op].push_back(s.latency_ms);
        all.push_back(s.latency_ms);
        buckets[static_cast<uint64_t>(s.t_submit_ms / 1000.0)]++;
        if (s.outcome == "granted") {
            r.granted++;
        } else if (s.outcome == "denied") {
            r.denied++;
        } else {
            r.failed++;
        }
    }
    for (auto& [op, values] : per_op) {
        r.by_op[op] = percentiles_of(values);
    }
    r.overall = percentiles_of(all);

    std::sort(all.begin(), all.end());
    r.cdf.reserve(all.size());
    for (size_t i = 0; i < all.size(); ++i) {
        r.cdf.push_back(
            {all[i], static_cast<double>(i + 1) /
                         static_cast<double>(all.size())});
    }
    for (const auto& [sec, count] : buckets) {
        r.rps_timeline.emplace_back(static_cast<double>(sec),
                                    static_cast<double>(count));
    }
    return r;
}

std::string LatencyReport::to_json() const {
    nlohmann::json j;
    auto pct = [](const Percentiles& p) {
        return nlohmann::json{
            {"p50", p.p50}, {"p90", p.p90}, {"p99", p.p99}, {"p99.9", p.p999}};
    };
    j["samples"] = samples.size();
    j["granted"] = granted;
    j["denied"] = denied;
    j["failed"] = failed;
    j["overall"] = pct(overall);
    for (const auto& [op, p] : by_op) {
        j["by_op"][op] = pct(p);
    }
    j["replica_timeline"] = nlohmann::json::array();
    for (const auto& [t, n] : replica_timeline) {
        j["replica_timeline"].push_back({{"t_ms", t}, {"replicas", n}});
    }
    j["rps_timeline"] = nlohmann::json::array();
    for (const auto& [t, rps] : rps_timeline) {
        j["rps_timeline"].push_back({{"t_s", t}, {"rps", rps}});
    }
    return j.dump(2);
}

std::string LatencyReport::to_csv() const {
    std::ostringstream out;
    out << "op,t_submit_ms,latency_ms,outcome\n";
    for (const auto& s : samples) {
        out << s.op << ',' << s.t_submit_ms << ',' << s.latency_ms << ','
            << s.outcome << '\n';
    }
    return out.str();
}

std::string LatencyReport::cdf_table() const {
    std::ostringstream out;
    out << "# latency_ms fraction\n";
    for (const auto& p : cdf) {
        out << p.latency_ms << ' ' << p.fraction << '\n';
    }
    return out.str();
}

}  // namespace vpki::harness
