#include "vpki/harness/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace vpki::harness {

ScalingController::ScalingController(ScalePolicy policy)
    : policy_(policy), current_(policy.min_replicas) {
    if (policy_.min_replicas < 1 || policy_.min_replicas > policy_.max_replicas) {
        throw std::invalid_argument("replica bounds must satisfy 1 <= min <= max");
    }
    if (policy_.target_utilization <= 0 || policy_.target_utilization >= 1) {
        throw std::invalid_argument("target utilization must lie in (0, 1)");
    }
}

size_t ScalingController::clamp(size_t n) const {
    if (n < policy_.min_replicas) return policy_.min_replicas;
    if (n > policy_.max_replicas) return policy_.max_replicas;
    return n;
}

size_t ScalingController::on_tick(double utilization) {
    double raw = std::ceil(static_cast<double>(current_) * utilization /
                           policy_.target_utilization);
    size_t desired = clamp(raw <= 0 ? 0 : static_cast<size_t>(raw));

    if (utilization < policy_.target_utilization) {
        below_++;
    } else {
        below_ = 0;
    }

    if (desired > current_) {
        current_ = desired;
        below_ = 0;
    } else if (desired < current_ && below_ >= policy_.scale_in_ticks) {
        current_ = desired;
    }
    timeline_.push_back(current_);
    return current_;
}

}  // namespace vpki::harness
