#include "vpki/store/record_store.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "vpki/core/encoding.hpp"

namespace vpki::store {

namespace {

constexpr char kMagic[] = "VPKR1";
constexpr uint8_t kTagTicket = 'T';
constexpr uint8_t kTagBatch = 'B';

Bytes encode_ticket(const TicketRecord& r) {
    return canonical_encode({Bytes{kTagTicket}, r.sn_tkt, r.sn_ltc, r.ik_tkt,
                             r.rnd_ik_tkt, u64be(r.t_s), u64be(r.t_e),
                             u64be(r.exp_tkt), u64be(r.issued_at),
                             Bytes{r.fail_open_flagged ? uint8_t{1} : uint8_t{0}}});
}

Bytes encode_batch(const PseudonymBatchRecord& r) {
    std::vector<Bytes> fields;
    fields.push_back(Bytes{kTagBatch});
    fields.push_back(r.sn_tkt);
    fields.push_back(r.rnd_v);
    fields.push_back(r.ticket_bytes);
    fields.push_back(u64be(r.issued_at));
    fields.push_back(Bytes{r.fail_open_flagged ? uint8_t{1} : uint8_t{0}});
    for (const auto& sn : r.serials) fields.push_back(to_bytes(sn));
    return canonical_encode(fields);
}

TicketRecord decode_ticket(Decoder& d) {
    TicketRecord r;
    r.sn_tkt = d.fixed(16);
    r.sn_ltc = d.fixed(16);
    r.ik_tkt = d.digest_field();
    r.rnd_ik_tkt = d.fixed(32);
    r.t_s = d.u64_field();
    r.t_e = d.u64_field();
    r.exp_tkt = d.u64_field();
    r.issued_at = d.u64_field();
    r.fail_open_flagged = d.fixed(1)[0] != 0;
    d.expect_done();
    return r;
}

PseudonymBatchRecord decode_batch(Decoder& d) {
    PseudonymBatchRecord r;
    r.sn_tkt = d.fixed(16);
    r.rnd_v = d.fixed(32);
    r.ticket_bytes = d.field();
    r.issued_at = d.u64_field();
    r.fail_open_flagged = d.fixed(1)[0] != 0;
    while (!d.done()) r.serials.push_back(d.digest_field());
    return r;
}

Bytes frame(const Bytes& body) {
    Bytes out;
    put_u32be(out, static_cast<uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Bytes dedup_key(uint8_t tag, const Bytes& sn) {
    Bytes k{tag};
    k.insert(k.end(), sn.begin(), sn.end());
    return k;
}

}  // namespace

RecordStore::RecordStore(StoreOptions options) : options_(std::move(options)) {
    if (!options_.path.empty()) load_existing();
    drainer_ = std::thread([this] { drain_loop(); });
}

RecordStore::~RecordStore() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    queue_cv_.notify_all();
    if (drainer_.joinable()) drainer_.join();
}

void RecordStore::load_existing() {
    std::ifstream in(options_.path, std::ios::binary);
    if (!in) return;
    std::vector<char> magic(5);
    if (!in.read(magic.data(), 5) ||
        std::string(magic.begin(), magic.end()) != kMagic) {
        return;
    }
    for (;;) {
        uint8_t len_buf[4];
        if (!in.read(reinterpret_cast<char*>(len_buf), 4)) break;
        uint32_t len = get_u32be(ByteView(len_buf, 4), 0);
        Bytes body(len);
        if (!in.read(reinterpret_cast<char*>(body.data()), len)) break;
        try {
            Decoder d(body);
            uint8_t tag = d.fixed(1)[0];
            if (tag == kTagTicket) {
                TicketRecord r = decode_ticket(d);
                persisted_keys_.insert(dedup_key(kTagTicket, r.sn_tkt));
                index_ticket(r);
            } else if (tag == kTagBatch) {
                PseudonymBatchRecord r = decode_batch(d);
                persisted_keys_.insert(dedup_key(kTagBatch, r.sn_tkt));
                index_batch(r);
            }
            ++durable_;
        } catch (const EncodingError&) {
            break;  // torn tail write; ignore the remainder
        }
    }
}

void RecordStore::index_ticket(const TicketRecord& rec) {
    tickets_.emplace(rec.sn_tkt, rec);
}

bool RecordStore::index_batch(const PseudonymBatchRecord& rec) {
    auto [it, inserted] = batches_.emplace(rec.sn_tkt, rec);
    if (!inserted) return false;
    for (size_t i = 0; i < rec.serials.size(); ++i) {
        serial_index_.emplace(rec.serials[i],
                              std::make_pair(rec.sn_tkt, i + 1));
    }
    return true;
}

void RecordStore::append_ticket_record(TicketRecord rec) {
    Bytes body = encode_ticket(rec);
    std::lock_guard lock(mu_);
    if (queue_.size() >= options_.max_queue) throw Backpressure();
    tickets_.emplace(rec.sn_tkt, rec);  // eager index, first write wins
    queue_.emplace_back(dedup_key(kTagTicket, rec.sn_tkt), frame(body));
    queue_cv_.notify_one();
}

void RecordStore::append_batch_record(PseudonymBatchRecord rec) {
    Bytes body = encode_batch(rec);
    std::lock_guard lock(mu_);
    if (queue_.size() >= options_.max_queue) throw Backpressure();
    index_batch(rec);  // eager, so Resolve works before the durable drain
    queue_.emplace_back(dedup_key(kTagBatch, rec.sn_tkt), frame(body));
    queue_cv_.notify_one();
}

void RecordStore::persist(const Bytes& framed) {
    if (options_.path.empty()) return;
    bool fresh = !std::ifstream(options_.path).good();
    std::ofstream out(options_.path, std::ios::binary | std::ios::app);
    if (!out) return;
    if (fresh) out.write(kMagic, 5);
    out.write(reinterpret_cast<const char*>(framed.data()),
              static_cast<std::streamsize>(framed.size()));
    out.flush();
}

void RecordStore::drain_loop() {
    for (;;) {
        std::unique_lock lock(mu_);
        queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
        // Unflushed records are discarded on shutdown; durability is only
        // promised once flush() has returned.
        if (stopping_) return;
        if (queue_.empty()) continue;
        auto [key, framed] = std::move(queue_.front());
        queue_.pop_front();
        bool duplicate = !persisted_keys_.insert(key).second;
        lock.unlock();

        if (duplicate) {
            std::cerr << "record-store: duplicate record skipped: "
                      << to_hex(ByteView(key).subspan(1)) << "\n";
        } else {
            if (options_.write_delay_ms > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(options_.write_delay_ms));
            }
            persist(framed);
        }

        lock.lock();
        if (!duplicate) ++durable_;
        if (queue_.empty()) drained_cv_.notify_all();
    }
}

void RecordStore::flush() {
    std::unique_lock lock(mu_);
    drained_cv_.wait(lock, [&] { return queue_.empty(); });
}

std::optional<TicketRecord> RecordStore::lookup_ticket(ByteView sn_tkt) const {
    std::lock_guard lock(mu_);
    auto it = tickets_.find(Bytes(sn_tkt.begin(), sn_tkt.end()));
    if (it == tickets_.end()) return std::nullopt;
    return it->second;
}

std::optional<PseudonymBatchRecord> RecordStore::lookup_batch(
    ByteView sn_tkt) const {
    std::lock_guard lock(mu_);
    auto it = batches_.find(Bytes(sn_tkt.begin(), sn_tkt.end()));
    if (it == batches_.end()) return std::nullopt;
    return it->second;
}

std::optional<BatchLookup> RecordStore::lookup_by_pseudonym_serial(
    const Digest& sn_i) const {
    std::lock_guard lock(mu_);
    auto it = serial_index_.find(sn_i);
    if (it == serial_index_.end()) return std::nullopt;
    auto bit = batches_.find(it->second.first);
    if (bit == batches_.end()) return std::nullopt;
    return BatchLookup{bit->second, it->second.second};
}

size_t RecordStore::purge_before(uint64_t cutoff_s) {
    flush();
    std::lock_guard lock(mu_);
    size_t dropped = 0;
    for (auto it = tickets_.begin(); it != tickets_.end();) {
        if (it->second.exp_tkt < cutoff_s) {
            persisted_keys_.erase(dedup_key(kTagTicket, it->first));
            it = tickets_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    for (auto it = batches_.begin(); it != batches_.end();) {
        if (it->second.issued_at < cutoff_s) {
            for (const auto& sn : it->second.serials) serial_index_.erase(sn);
            persisted_keys_.erase(dedup_key(kTagBatch, it->first));
            it = batches_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    if (!options_.path.empty() && dropped > 0) {
        std::string tmp = options_.path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(kMagic, 5);
            for (const auto& [sn, rec] : tickets_) {
                Bytes framed = frame(encode_ticket(rec));
                out.write(reinterpret_cast<const char*>(framed.data()),
                          static_cast<std::streamsize>(framed.size()));
            }
            for (const auto& [sn, rec] : batches_) {
                Bytes framed = frame(encode_batch(rec));
                out.write(reinterpret_cast<const char*>(framed.data()),
                          static_cast<std::streamsize>(framed.size()));
            }
        }
        std::rename(tmp.c_str(), options_.path.c_str());
        durable_ = tickets_.size() + batches_.size();
    }
    return dropped;
}

size_t RecordStore::pending() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

size_t RecordStore::durable_count() const {
    std::lock_guard lock(mu_);
    return durable_;
}

}  // namespace vpki::store
