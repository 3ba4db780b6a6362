#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "credsec/ledger.hpp"

// Out-of-band access to the raw chain file. Not part of the ledger API: these
// functions exist to inject tampering in tests and in the tamper tool. Run
// them only while no Ledger instance is appending to the same directory.
namespace credsec::ledger::maintenance {

/// Byte offsets of every frame, in order: from the sidecar index when it is
/// consistent with the chain file, otherwise by scanning readable frames.
std::vector<std::uint64_t> frame_offsets(const std::filesystem::path& dir);

/// Size in bytes of frame `index`. Throws Error{target_missing}.
std::size_t frame_size(const std::filesystem::path& dir, std::uint64_t index);

/// Flips one bit at `bit` (counted from the start of the frame, MSB first).
void flip_bit(const std::filesystem::path& dir, std::uint64_t index, std::uint64_t bit);

/// XORs `mask` into the byte at `byte_offset` within the frame.
void xor_byte(const std::filesystem::path& dir, std::uint64_t index, std::uint64_t byte_offset, std::uint8_t mask);

/// Replaces frame `index` with `block`, recomputing its block_hash but leaving
/// every other block untouched. The new frame must have the same size.
void rewrite_block(const std::filesystem::path& dir, std::uint64_t index, Block block);

}  // namespace credsec::ledger::maintenance
