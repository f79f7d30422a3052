#include "vpki/gateway/gauge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace vpki::gateway {

namespace {

uint64_t steady_ms() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

}  // namespace

LoadGauge::LoadGauge(std::function<uint64_t()> now_ms_fn, double window_s)
    : now_ms_fn_(std::move(now_ms_fn)), window_ms_(window_s * 1000.0) {
    folded_at_ = now_ms();
}

uint64_t LoadGauge::now_ms() const {
    return now_ms_fn_ ? now_ms_fn_() : steady_ms();
}

// Folds the busy time accumulated since the last fold into the EWMA. The
// decay weight derives from the elapsed interval so the result is
// independent of how often callers sample.
void LoadGauge::fold(uint64_t t) {
    if (t <= folded_at_) return;
    double elapsed = double(t - folded_at_);
    double sample = std::min(1.0, pending_busy_ms_ / elapsed);
    double alpha = 1.0 - std::exp(-elapsed / window_ms_);
    ewma_ = alpha * sample + (1.0 - alpha) * ewma_;
    pending_busy_ms_ = 0.0;
    folded_at_ = t;
}

void LoadGauge::op_started() {
    std::lock_guard lock(mu_);
    ++in_flight_;
}

void LoadGauge::op_finished(uint64_t busy_ms) {
    std::lock_guard lock(mu_);
    if (in_flight_ > 0) --in_flight_;
    pending_busy_ms_ += double(busy_ms);
}

double LoadGauge::utilization() {
    std::lock_guard lock(mu_);
    fold(now_ms());
    return std::clamp(ewma_, 0.0, 1.0);
}

size_t LoadGauge::in_flight() const {
    std::lock_guard lock(mu_);
    return in_flight_;
}

}  // namespace vpki::gateway
