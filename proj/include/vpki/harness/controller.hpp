#ifndef VPKI_HARNESS_CONTROLLER_HPP
#define VPKI_HARNESS_CONTROLLER_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace vpki::harness {

struct ScalePolicy {
    size_t min_replicas = 1;
    size_t max_replicas = 8;
    double target_utilization = 0.6;
    uint64_t tick_ms = 5000;
    // Consecutive below-target ticks required before scaling in.
    int scale_in_ticks = 3;
};

// Horizontal autoscaler over a replica pool. Each tick computes
// desired = ceil(current * utilization / target), clamped to [min, max].
// Scale-out applies immediately; scale-in only after the utilization has
// stayed below target for scale_in_ticks consecutive ticks, so short dips
// do not thrash the pool.
class ScalingController {
public:
    explicit ScalingController(ScalePolicy policy);

    // Feeds one utilization observation; returns the new replica count.
    size_t on_tick(double utilization);

    size_t replicas() const { return current_; }
    const std::vector<size_t>& timeline() const { return timeline_; }

private:
    size_t clamp(size_t n) const;

    ScalePolicy policy_;
    size_t current_;
    int below_ = 0;
    std::vector<size_t> timeline_;
};

}  // namespace vpki::harness

#endif
