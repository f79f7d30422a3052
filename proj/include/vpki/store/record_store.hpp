#ifndef VPKI_STORE_RECORD_STORE_HPP
#define VPKI_STORE_RECORD_STORE_HPP

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "vpki/core/bytes.hpp"
#include "vpki/core/outcome.hpp"

namespace vpki::store {

// Audit row for a ticket issuance; lets a resolver recompute
// IK_tkt = H(LTC || t_s || t_e || rnd_ik_tkt) from the referenced LTC.
struct TicketRecord {
    Bytes sn_tkt;       // 16 bytes
    Bytes sn_ltc;       // 16 bytes
    Digest ik_tkt;
    Bytes rnd_ik_tkt;   // 32 bytes
    uint64_t t_s = 0;
    uint64_t t_e = 0;
    uint64_t exp_tkt = 0;
    uint64_t issued_at = 0;
    bool fail_open_flagged = false;  // issued while the guard was unreachable
};

// Audit row for a pseudonym batch; the serial chain is recomputable from
// rnd_v, so one row resolves every pseudonym of the batch.
struct PseudonymBatchRecord {
    Bytes sn_tkt;
    Bytes rnd_v;                   // 32 bytes
    std::vector<Digest> serials;   // SN^1..SN^n
    Bytes ticket_bytes;            // ticket as presented
    uint64_t issued_at = 0;
    bool fail_open_flagged = false;
};

struct BatchLookup {
    PseudonymBatchRecord record;
    size_t index;  // 1-based position of the queried serial
};

struct StoreOptions {
    std::string path;            // empty -> memory-only (no durability)
    size_t max_queue = 65536;
    uint64_t write_delay_ms = 0; // artificial durable-write latency
};

// Hybrid-store persistence half: appends are enqueued and drained to an
// append-only file by a background thread, so issuance latency never includes
// the durable write. The lookup index is written eagerly at enqueue time.
//
// File format: magic "VPKR1", then length-framed records, each a canonical
// field list starting with a one-byte type tag.
class RecordStore {
public:
    explicit RecordStore(StoreOptions options = {});
    ~RecordStore();

    // Throws Backpressure when the queue is full; the caller may retry.
    class Backpressure : public std::runtime_error {
    public:
        Backpressure() : std::runtime_error("record queue full") {}
    };

    void append_ticket_record(TicketRecord rec);
    void append_batch_record(PseudonymBatchRecord rec);

    // Blocks until every enqueued record is durably written.
    void flush();

    std::optional<TicketRecord> lookup_ticket(ByteView sn_tkt) const;
    std::optional<PseudonymBatchRecord> lookup_batch(ByteView sn_tkt) const;
    std::optional<BatchLookup> lookup_by_pseudonym_serial(
        const Digest& sn_i) const;

    // Rewrites the backing file dropping records expired before `cutoff_s`
    // (ticket exp_tkt, batch final slot end inferred from the ticket bytes is
    // not tracked; batches are purged on issued_at). Returns records dropped.
    size_t purge_before(uint64_t cutoff_s);

    size_t pending() const;
    size_t durable_count() const;

private:
    void drain_loop();
    void persist(const Bytes& framed);
    void index_ticket(const TicketRecord& rec);
    bool index_batch(const PseudonymBatchRecord& rec);
    void load_existing();

    StoreOptions options_;

    mutable std::mutex mu_;
    std::condition_variable queue_cv_;
    std::condition_variable drained_cv_;
    std::deque<std::pair<Bytes, Bytes>> queue_;  // (sn key, framed record)
    bool stopping_ = false;
    size_t durable_ = 0;

    std::set<Bytes> persisted_keys_;  // duplicate rejection at drain time
    std::map<Bytes, TicketRecord> tickets_;
    std::map<Bytes, PseudonymBatchRecord> batches_;
    std::map<Digest, std::pair<Bytes, size_t>> serial_index_;

    std::thread drainer_;
};

}  // namespace vpki::store

#endif
