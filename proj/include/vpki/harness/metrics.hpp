#ifndef VPKI_HARNESS_METRICS_HPP
#define VPKI_HARNESS_METRICS_HPP

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace vpki::harness {

// One completed request. Outcome strings are "granted", "denied" or
// "failed"; denied covers protocol denials (Sybil, reuse), failed covers
// transport errors and anything unexpected.
struct Sample {
    std::string op;
    double t_submit_ms = 0;
    double latency_ms = 0;
    std::string outcome;
};

// Append sink shared by all generator threads.
class Recorder {
public:
    void add(Sample s);
    std::vector<Sample> take();
    size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<Sample> samples_;
};

struct Percentiles {
    double p50 = 0;
    double p90 = 0;
    double p99 = 0;
    double p999 = 0;
};

// F(latency) = rank / count, one point per sample of the sorted series.
struct CdfPoint {
    double latency_ms = 0;
    double fraction = 0;
};

// Nearest-rank percentile over an unsorted sample set; p in (0, 1].
double percentile(std::vector<double> values, double p);

Percentiles percentiles_of(const std::vector<double>& values);

struct LatencyReport {
    std::vector<Sample> samples;
    std::map<std::string, Percentiles> by_op;
    Percentiles overall;
    std::vector<CdfPoint> cdf;
    // (elapsed_ms, active replicas) and (bucket start s, requests/s).
    std::vector<std::pair<double, size_t>> replica_timeline;
    std::vector<std::pair<double, double>> rps_timeline;
    size_t granted = 0;
    size_t denied = 0;
    size_t failed = 0;

    static LatencyReport build(
        std::vector<Sample> samples,
        std::vector<std::pair<double, size_t>> replica_timeline = {});

    std::string to_json() const;
    // Columns: op, t_submit_ms, latency_ms, outcome.
    std::string to_csv() const;
    // Two columns per line (latency_ms, fraction), plottable as-is.
    std::string cdf_table() const;
};

}  // namespace vpki::harness

#endif
