#include "vpki/guard/guard.hpp"

namespace vpki::guard {

void InMemoryGuard::check_available() const {
    if (!available_) throw GuardUnavailableError("guard backend down");
}

IntervalClaim InMemoryGuard::claim_ticket_interval(ByteView sn_ltc,
                                                   uint64_t tkt_start,
                                                   uint64_t tkt_exp) {
    std::lock_guard lock(mu_);
    check_available();
    Bytes key(sn_ltc.begin(), sn_ltc.end());
    auto it = intervals_.find(key);
    if (it == intervals_.end()) {
        intervals_[key] = tkt_exp;
        return {Claim::Granted, std::nullopt};
    }
    if (it->second <= tkt_start) {
        uint64_t prev = it->second;
        it->second = tkt_exp;
        return {Claim::Granted, prev};
    }
    return {Claim::Denied, std::nullopt};
}

void InMemoryGuard::revert_ticket_interval(ByteView sn_ltc,
                                           std::optional<uint64_t> prev) {
    std::lock_guard lock(mu_);
    check_available();
    Bytes key(sn_ltc.begin(), sn_ltc.end());
    if (prev) {
        intervals_[key] = *prev;
    } else {
        intervals_.erase(key);
    }
}

Claim InMemoryGuard::claim_ticket_once(ByteView sn_tkt) {
    std::lock_guard lock(mu_);
    check_available();
    Bytes key(sn_tkt.begin(), sn_tkt.end());
    auto it = used_.find(key);
    if (it == used_.end() || !it->second) {
        used_[key] = true;
        return Claim::Granted;
    }
    return Claim::Denied;
}

void InMemoryGuard::revert_ticket_once(ByteView sn_tkt) {
    std::lock_guard lock(mu_);
    check_available();
    used_[Bytes(sn_tkt.begin(), sn_tkt.end())] = false;
}

size_t InMemoryGuard::sweep_expired(uint64_t cutoff_s) {
    std::lock_guard lock(mu_);
    check_available();
    size_t removed = 0;
    for (auto it = intervals_.begin(); it != intervals_.end();) {
        if (it->second < cutoff_s) {
            it = intervals_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

void InMemoryGuard::set_available(bool available) {
    std::lock_guard lock(mu_);
    available_ = available;
}

size_t InMemoryGuard::interval_entries() const {
    std::lock_guard lock(mu_);
    return intervals_.size();
}

size_t InMemoryGuard::once_entries() const {
    std::lock_guard lock(mu_);
    return used_.size();
}

}  // namespace vpki::guard
