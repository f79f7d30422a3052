#ifndef VPKI_CORE_CHAIN_HPP
#define VPKI_CORE_CHAIN_HPP

#include "vpki/core/bytes.hpp"
#include "vpki/core/crypto.hpp"

namespace vpki::chain {

struct Slot {
    uint64_t t_s;
    uint64_t t_e;
};

struct Link {
    Digest ik_p;    // IK_{P^i}
    Digest serial;  // SN^i
    Digest rnd_ik;  // H^i(rnd_v), returned during issuance validation
};

// Identifiable key for slot i (1-based):
//   IK_{P^i} = H(ik_tkt || K^i || t_s^i || t_e^i || H^i(rnd_v))
Digest identifiable_key(const Digest& ik_tkt, ByteView public_key,
                        const Slot& slot, const Digest& rnd_ik);

// Chained serials over a whole batch:
//   SN^1 = H(IK_{P^1} || H^1(rnd_v)),  SN^i = H(SN^{i-1} || H^i(rnd_v)).
// One (SN^1, rnd_v) pair is enough to rederive every serial of the batch.
std::vector<Link> compute(const Digest& ik_tkt,
                          const std::vector<Bytes>& public_keys,
                          const std::vector<Slot>& slots, ByteView rnd_v);

// Rederives just the serial chain from the first serial and rnd_v.
std::vector<Digest> serials_from_first(const Digest& sn1, ByteView rnd_v,
                                       size_t n);

}  // namespace vpki::chain

#endif
