#ifndef VPKI_GATEWAY_GAUGE_HPP
#define VPKI_GATEWAY_GAUGE_HPP

#include <cstdint>
#include <functional>
#include <mutex>

namespace vpki::gateway {

// Utilization gauge published by every service endpoint: an exponentially
// weighted moving average of the busy-time fraction, plus the in-flight
// request count. The clock is injectable so controller tests can drive time.
class LoadGauge {
public:
    explicit LoadGauge(std::function<uint64_t()> now_ms_fn = {},
                       double window_s = 10.0);

    void op_started();
    // busy_ms is the handler's wall time for the finished operation.
    void op_finished(uint64_t busy_ms);

    double utilization();  // EWMA busy fraction, clamped to [0,1]
    size_t in_flight() const;

private:
    uint64_t now_ms() const;
    void fold(uint64_t t);

    std::function<uint64_t()> now_ms_fn_;
    double window_ms_;

    mutable std::mutex mu_;
    size_t in_flight_ = 0;
    double ewma_ = 0.0;
    double pending_busy_ms_ = 0.0;
    uint64_t folded_at_;
};

}  // namespace vpki::gateway

#endif
