#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "credsec/digest.hpp"

// Single-node append-only hash chain holding cipher credentials and their
// digests. Blocks live in one binary file; a sidecar file lists the byte
// offset of every block.
namespace credsec::ledger {

struct Record {
    std::string roll;
    std::string course;
    Bytes envelope;
    Sha256 credential_hash{};
    std::string uploaded_by;

    /// Builds a record whose digest is SHA-256 of `envelope`.
    static Record make(std::string roll, std::string course, Bytes envelope, std::string uploaded_by);

    friend bool operator==(const Record&, const Record&) = default;
};

struct Block {
    std::uint64_t index = 0;
    std::uint64_t timestamp = 0;
    Sha256 prev_hash{};
    std::vector<Record> records;
    Sha256 block_hash{};

    friend bool operator==(const Block&, const Block&) = default;
};

/// Length-prefixed big-endian encoding of index, timestamp, prev_hash and records.
Bytes canonical_body(const Block& block);
Sha256 compute_block_hash(const Block& block);

/// Frame stored on disk: u32 body length | body | block_hash.
Bytes encode_frame(const Block& block);

/// Parses one frame starting at `offset`. Returns nullopt on any structural
/// problem; `next` receives the offset just past the frame.
std::optional<Block> decode_frame(std::span<const std::uint8_t> data, std::size_t offset, std::size_t* next);

struct VerifyResult {
    bool ok = true;
    std::optional<std::uint64_t> first_bad_index;
    std::string reason;
};

class Ledger {
public:
    using Clock = std::function<std::uint64_t()>;

    static constexpr const char* kChainFile = "chain.bin";
    static constexpr const char* kIndexFile = "chain.idx";

    /// Opens or creates the chain under `dir`. A damaged chain still opens;
    /// blocks past the first unreadable frame are not indexed.
    explicit Ledger(std::filesystem::path dir, Clock clock = {});

    /// Appends one block and fsyncs it before returning. Throws
    /// Error{record_hash_mismatch}, or Error{persistence_failure} on I/O
    /// failure or when the chain was opened damaged.
    Block append(std::vector<Record> records);

    /// Re-reads the chain from disk and checks every hash and link.
    VerifyResult verify() const;

    /// Most recent record for (roll, course). Throws Error{not_found}.
    Record latest(const std::string& roll, const std::string& course) const;

    /// Latest record of every course stored for `roll`, ordered by course.
    std::vector<Record> latest_for_roll(const std::string& roll) const;

    std::size_t size() const;

    /// All blocks as currently stored on disk, up to the first unreadable frame.
    std::vector<Block> blocks() const;

    const std::filesystem::path& directory() const { return dir_; }

private:
    struct Location {
        std::uint64_t block = 0;
        std::size_t record = 0;
    };

    void load();
    Bytes read_chain() const;
    Block read_block(std::uint64_t index) const;

    std::filesystem::path dir_;
    Clock clock_;
    mutable std::shared_mutex mutex_;
    std::vector<std::uint64_t> offsets_;
    std::uint64_t end_offset_ = 0;
    bool damaged_ = false;  // an unreadable frame was found at open
    Sha256 tip_{};
    std::unordered_map<std::string, Location> latest_;  // key: roll '\0' course
    std::unordered_map<std::string, std::set<std::string>> courses_;
};

}  // namespace credsec::ledger
