#include "credsec/ledger_maintenance.hpp"

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

#include <optional>

namespace credsec::ledger::maintenance {
namespace {

std::filesystem::path chain_path(const std::filesystem::path& dir) {
    const auto path = dir / Ledger::kChainFile;
    if (!std::filesystem::exists(path)) {
        throw Error(Errc::target_missing, "no chain file in " + dir.string());
    }
    return path;
}

struct Located {
    Bytes chain;
    std::size_t offset = 0;
    std::size_t size = 0;
};

// Frame starts from the sidecar index when it is consistent with the chain
// file, so a frame whose length prefix was damaged can still be found.
std::optional<std::vector<std::uint64_t>> indexed_offsets(const std::filesystem::path& dir, std::size_t chain_size) {
    const auto path = dir / Ledger::kIndexFile;
    if (!std::filesystem::exists(path)) {
        return std::nullopt;
    }
    const Bytes idx = fsio::read_file(path);
    if (idx.size() % 8 != 0) {
        return std::nullopt;
    }
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < idx.size(); i += 8) {
        std::uint64_t v = 0;
        for (std::size_t j = 0; j < 8; ++j) {
            v = (v << 8) | idx[i + j];
        }
        if (v >= chain_size || (!out.empty() && v <= out.back()) || (out.empty() && v != 0)) {
            return std::nullopt;
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> scanned_offsets(const Bytes& chain) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos < chain.size()) {
        std::size_t next = 0;
        if (!decode_frame(chain, pos, &next)) {
            break;
        }
        out.push_back(pos);
        pos = next;
    }
    return out;
}

std::vector<std::uint64_t> offsets_of(const std::filesystem::path& dir, const Bytes& chain) {
    auto indexed = indexed_offsets(dir, chain.size());
    return indexed ? *indexed : scanned_offsets(chain);
}

Located locate(const std::filesystem::path& dir, std::uint64_t index) {
    Located out;
    out.chain = fsio::read_file(chain_path(dir));
    const auto offsets = offsets_of(dir, out.chain);
    if (index >= offsets.size()) {
        throw Error(Errc::target_missing, "block " + std::to_string(index) + " does not exist");
    }
    out.offset = offsets[index];
    out.size = (index + 1 < offsets.size() ? offsets[index + 1] : out.chain.size()) - out.offset;
    return out;
}

}  // namespace

std::vector<std::uint64_t> frame_offsets(const std::filesystem::path& dir) {
    const Bytes chain = fsio::read_file(chain_path(dir));
    return offsets_of(dir, chain);
}

std::size_t frame_size(const std::filesystem::path& dir, std::uint64_t index) {
    return locate(dir, index).size;
}

void flip_bit(const std::filesystem::path& dir, std::uint64_t index, std::uint64_t bit) {
    auto loc = locate(dir, index);
    if (bit >= loc.size * 8) {
        throw Error(Errc::target_missing, "bit offset past the end of block " + std::to_string(index));
    }
    loc.chain[loc.offset + bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    fsio::atomic_write(dir / Ledger::kChainFile, loc.chain);
}

void xor_byte(const std::filesystem::path& dir, std::uint64_t index, std::uint64_t byte_offset, std::uint8_t mask) {
    auto loc = locate(dir, index);
    if (byte_offset >= loc.size) {
        throw Error(Errc::target_missing, "byte offset past the end of block " + std::to_string(index));
    }
    loc.chain[loc.offset + byte_offset] ^= mask;
    fsio::atomic_write(dir / Ledger::kChainFile, loc.chain);
}

void rewrite_block(const std::filesystem::path& dir, std::uint64_t index, Block block) {
    auto loc = locate(dir, index);
    block.block_hash = compute_block_hash(block);
    const Bytes frame = encode_frame(block);
    if (frame.size() != loc.size) {
        throw Error(Errc::invalid_params, "rewritten block must keep its frame size");
    }
    std::copy(frame.begin(), frame.end(), loc.chain.begin() + static_cast<std::ptrdiff_t>(loc.offset));
    fsio::atomic_write(dir / Ledger::kChainFile, loc.chain);
}

}  // namespace credsec::ledger::maintenance
