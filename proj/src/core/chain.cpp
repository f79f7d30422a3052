#include "vpki/core/chain.hpp"

#include <stdexcept>

namespace vpki::chain {

Digest identifiable_key(const Digest& ik_tkt, ByteView public_key,
                        const Slot& slot, const Digest& rnd_ik) {
    return hash_fields(
        {ik_tkt, public_key, u64be(slot.t_s), u64be(slot.t_e), rnd_ik});
}

std::vector<Link> compute(const Digest& ik_tkt,
                          const std::vector<Bytes>& public_keys,
                          const std::vector<Slot>& slots, ByteView rnd_v) {
    if (public_keys.size() != slots.size()) {
        throw std::invalid_argument("keys/slots size mismatch");
    }
    std::vector<Link> out;
    out.reserve(slots.size());
    Digest h_i = iterated_hash(rnd_v, 1);
    for (size_t i = 0; i < slots.size(); ++i) {
        if (i > 0) h_i = hash(h_i);  // H^{i+1}(rnd_v)
        Link link;
        link.rnd_ik = h_i;
        link.ik_p = identifiable_key(ik_tkt, public_keys[i], slots[i], h_i);
        link.serial = (i == 0) ? hash_fields({link.ik_p, h_i})
                               : hash_fields({out[i - 1].serial, h_i});
        out.push_back(link);
    }
    return out;
}

std::vector<Digest> serials_from_first(const Digest& sn1, ByteView rnd_v,
                                       size_t n) {
    std::vector<Digest> out;
    out.reserve(n);
    if (n == 0) return out;
    out.push_back(sn1);
    Digest h_i = iterated_hash(rnd_v, 1);
    for (size_t i = 1; i < n; ++i) {
        h_i = hash(h_i);
        out.push_back(hash_fields({out[i - 1], h_i}));
    }
    return out;
}

}  // namespace vpki::chain
