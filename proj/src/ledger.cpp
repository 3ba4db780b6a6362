#include "credsec/ledger.hpp"

#include <chrono>
#include <fstream>
#include <mutex>

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

namespace credsec::ledger {
namespace {

constexpr std::size_t kMaxBody = std::size_t{1} << 31;

void put_u32(Bytes& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(Bytes& out, std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_blob(Bytes& out, std::span<const std::uint8_t> data) {
    put_u64(out, data.size());
    out.insert(out.end(), data.begin(), data.end());
}

void put_text(Bytes& out, const std::string& s) {
    put_blob(out, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

/// Bounds-checked big-endian reader; every accessor fails softly.
class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::size_t pos) : data_(data), pos_(pos) {}

    bool u32(std::uint32_t& v) { return fixed(v); }
    bool u64(std::uint64_t& v) { return fixed(v); }

    bool digest(Sha256& d) {
        if (remaining() < d.size()) return false;
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), d.size(), d.begin());
        pos_ += d.size();
        return true;
    }

    bool blob(Bytes& out) {
        std::uint64_t len = 0;
        if (!u64(len) || len > remaining()) return false;
        const auto first = data_.begin() + static_cast<std::ptrdiff_t>(pos_);
        out.assign(first, first + static_cast<std::ptrdiff_t>(len));
        pos_ += static_cast<std::size_t>(len);
        return true;
    }

    bool text(std::string& out) {
        Bytes raw;
        if (!blob(raw)) return false;
        out.assign(raw.begin(), raw.end());
        return true;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    template <typename T>
    bool fixed(T& v) {
        if (remaining() < sizeof(T)) return false;
        v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>(v << 8 | data_[pos_ + i]);
        pos_ += sizeof(T);
        return true;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_;
};

std::uint64_t system_clock_seconds() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

std::string key_of(const std::string& roll, const std::string& course) {
    std::string k = roll;
    k.push_back('\0');
    k += course;
    return k;
}

}  // namespace

Record Record::make(std::string roll, std::string course, Bytes envelope, std::string uploaded_by) {
    Record r;
    r.roll = std::move(roll);
    r.course = std::move(course);
    r.credential_hash = sha256(envelope);
    r.envelope = std::move(envelope);
    r.uploaded_by = std::move(uploaded_by);
    return r;
}

Bytes canonical_body(const Block& block) {
    Bytes out;
    put_u64(out, block.index);
    put_u64(out, block.timestamp);
    out.insert(out.end(), block.prev_hash.begin(), block.prev_hash.end());
    put_u32(out, static_cast<std::uint32_t>(block.records.size()));
    for (const auto& r : block.records) {
        put_text(out, r.roll);
        put_text(out, r.course);
        put_blob(out, r.envelope);
        out.insert(out.end(), r.credential_hash.begin(), r.credential_hash.end());
        put_text(out, r.uploaded_by);
    }
    return out;
}

Sha256 compute_block_hash(const Block& block) {
    return sha256(canonical_body(block));
}

Bytes encode_frame(const Block& block) {
    const Bytes body = canonical_body(block);
    Bytes out;
    out.reserve(4 + body.size() + 32);
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), block.block_hash.begin(), block.block_hash.end());
    return out;
}

std::optional<Block> decode_frame(std::span<const std::uint8_t> data, std::size_t offset, std::size_t* next) {
    Reader head(data, offset);
    std::uint32_t body_len = 0;
    if (!head.u32(body_len) || body_len > kMaxBody || head.remaining() < std::size_t{body_len} + 32) {
        return std::nullopt;
    }
    const std::size_t body_start = head.pos();
    const std::size_t body_end = body_start + body_len;
    Reader r(data.first(body_end), body_start);
    Block b;
    std::uint32_t count = 0;
    if (!r.u64(b.index) || !r.u64(b.timestamp) || !r.digest(b.prev_hash) || !r.u32(count)) {
        return std::nullopt;
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        Record rec;
        if (!r.text(rec.roll) || !r.text(rec.course) || !r.blob(rec.envelope) || !r.digest(rec.credential_hash) ||
            !r.text(rec.uploaded_by)) {
            return std::nullopt;
        }
        b.records.push_back(std::move(rec));
    }
    if (r.remaining() != 0) {
        return std::nullopt;
    }
    Reader tail(data, body_end);
    if (!tail.digest(b.block_hash)) {
        return std::nullopt;
    }
    if (next != nullptr) {
        *next = tail.pos();
    }
    return b;
}

Ledger::Ledger(std::filesystem::path dir, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
    if (!clock_) {
        clock_ = system_clock_seconds;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) {
        throw Error(Errc::persistence_failure, "cannot create ledger directory " + dir_.string());
    }
    load();
}

Bytes Ledger::read_chain() const {
    const auto path = dir_ / kChainFile;
    if (!std::filesystem::exists(path)) {
        return {};
    }
    return fsio::read_file(path);
}

void Ledger::load() {
    const Bytes chain = read_chain();
    std::size_t pos = 0;
    while (pos < chain.size()) {
        std::size_t next = 0;
        auto block = decode_frame(chain, pos, &next);
        if (!block) {
            break;
        }
        offsets_.push_back(pos);
        for (std::size_t i = 0; i < block->records.size(); ++i) {
            const auto& rec = block->records[i];
            latest_[key_of(rec.roll, rec.course)] = Location{block->index, i};
            courses_[rec.roll].insert(rec.course);
        }
        tip_ = block->block_hash;
        pos = next;
    }
    end_offset_ = chain.size();

    // Sidecar index mirrors the block offsets; rebuild it when stale. A
    // damaged chain leaves the index alone: it still records where every
    // frame starts, which is what repair tooling needs.
    if (pos != chain.size()) {
        damaged_ = true;
        return;
    }
    Bytes expected;
    for (auto off : offsets_) put_u64(expected, off);
    const auto idx_path = dir_ / kIndexFile;
    Bytes current;
    if (std::filesystem::exists(idx_path)) {
        current = fsio::read_file(idx_path);
    }
    if (current != expected) {
        fsio::atomic_write(idx_path, expected);
    }
}

Block Ledger::append(std::vector<Record> records) {
    for (const auto& r : records) {
        if (sha256(r.envelope) != r.credential_hash) {
            throw Error(Errc::record_hash_mismatch,
                        "record for " + r.roll + "/" + r.course + " does not hash to its stated digest");
        }
    }
    std::unique_lock lock(mutex_);
    if (damaged_) {
        throw Error(Errc::persistence_failure, "chain file is damaged past block " + std::to_string(offsets_.size()) +
                                                   "; refusing to append");
    }
    Block block;
    block.index = offsets_.size();
    block.timestamp = clock_();
    block.prev_hash = offsets_.empty() ? Sha256{} : tip_;
    block.records = std::move(records);
    block.block_hash = compute_block_hash(block);

    const Bytes frame = encode_frame(block);
    const std::uint64_t offset = fsio::append_durable(dir_ / kChainFile, frame);
    Bytes idx_entry;
    put_u64(idx_entry, offset);
    fsio::append_durable(dir_ / kIndexFile, idx_entry);

    offsets_.push_back(offset);
    end_offset_ = offset + frame.size();
    tip_ = block.block_hash;
    for (std::size_t i = 0; i < block.records.size(); ++i) {
        const auto& rec = block.records[i];
        latest_[key_of(rec.roll, rec.course)] = Location{block.index, i};
        courses_[rec.roll].insert(rec.course);
    }
    return block;
}

VerifyResult Ledger::verify() const {
    std::shared_lock lock(mutex_);
    const Bytes chain = read_chain();
    VerifyResult out;
    auto bad = [&](std::uint64_t index, std::string reason) {
        out.ok = false;
        out.first_bad_index = index;
        out.reason = std::move(reason);
        return out;
    };

    std::size_t pos = 0;
    std::uint64_t index = 0;
    Sha256 prev{};
    while (pos < chain.size()) {
        std::size_t next = 0;
        const auto block = decode_frame(chain, pos, &next);
        if (!block) {
            return bad(index, "unreadable block frame");
        }
        if (block->index != index) {
            return bad(index, "block index field does not match its position");
        }
        if (block->prev_hash != prev) {
            return bad(index, "prev_hash does not link to the preceding block");
        }
        if (compute_block_hash(*block) != block->block_hash) {
            return bad(index, "block hash does not match block contents");
        }
        for (const auto& rec : block->records) {
            if (sha256(rec.envelope) != rec.credential_hash) {
                return bad(index, "record digest does not match its envelope");
            }
        }
        prev = block->block_hash;
        pos = next;
        ++index;
    }
    if (index < offsets_.size()) {
        return bad(index, "chain is shorter than the number of appended blocks");
    }
    return out;
}

Block Ledger::read_block(std::uint64_t index) const {
    const auto path = dir_ / kChainFile;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::persistence_failure, "cannot open " + path.string());
    }
    in.seekg(static_cast<std::streamoff>(offsets_.at(index)));
    std::uint8_t len_buf[4];
    if (!in.read(reinterpret_cast<char*>(len_buf), 4)) {
        throw Error(Errc::persistence_failure, "block " + std::to_string(index) + " is unreadable");
    }
    const std::uint32_t body_len = std::uint32_t{len_buf[0]} << 24 | std::uint32_t{len_buf[1]} << 16 |
                                   std::uint32_t{len_buf[2]} << 8 | len_buf[3];
    if (body_len > kMaxBody) {
        throw Error(Errc::persistence_failure, "block " + std::to_string(index) + " is unreadable");
    }
    Bytes frame(4 + std::size_t{body_len} + 32);
    std::copy(std::begin(len_buf), std::end(len_buf), frame.begin());
    if (!in.read(reinterpret_cast<char*>(frame.data() + 4), static_cast<std::streamsize>(frame.size() - 4))) {
        throw Error(Errc::persistence_failure, "block " + std::to_string(index) + " is truncated");
    }
    auto block = decode_frame(frame, 0, nullptr);
    if (!block) {
        throw Error(Errc::persistence_failure, "block " + std::to_string(index) + " is unreadable");
    }
    return std::move(*block);
}

Record Ledger::latest(const std::string& roll, const std::string& course) const {
    std::shared_lock lock(mutex_);
    const auto it = latest_.find(key_of(roll, course));
    if (it == latest_.end()) {
        throw Error(Errc::not_found, "no ledger record for " + roll + "/" + course);
    }
    Block block = read_block(it->second.block);
    if (it->second.record >= block.records.size()) {
        throw Error(Errc::persistence_failure, "ledger index points past the block's records");
    }
    return std::move(block.records[it->second.record]);
}

std::vector<Record> Ledger::latest_for_roll(const std::string& roll) const {
    std::vector<std::string> courses;
    {
        std::shared_lock lock(mutex_);
        if (const auto it = courses_.find(roll); it != courses_.end()) {
            courses.assign(it->second.begin(), it->second.end());
        }
    }
    std::vector<Record> out;
    for (const auto& c : courses) {
        out.push_back(latest(roll, c));
    }
    return out;
}

std::size_t Ledger::size() const {
    std::shared_lock lock(mutex_);
    return offsets_.size();
}

std::vector<Block> Ledger::blocks() const {
    std::shared_lock lock(mutex_);
    const Bytes chain = read_chain();
    std::vector<Block> out;
    std::size_t pos = 0;
    while (pos < chain.size()) {
        std::size_t next = 0;
        auto block = decode_frame(chain, pos, &next);
        if (!block) {
            break;
        }
        out.push_back(std::move(*block));
        pos = next;
    }
    return out;
}

}  // namespace credsec::ledger
