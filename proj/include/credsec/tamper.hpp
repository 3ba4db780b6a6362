#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

// Raw mutation of stored data, bypassing every service API. Used by tests and
// `credsec tamper` to play the adversary. Services should be quiesced first.
namespace credsec::tamper {

struct Mutation {
    enum class Kind { bit, byte };
    Kind kind = Kind::byte;
    std::uint64_t offset = 0;  // bit index (MSB first) or byte index
    std::uint8_t mask = 0xff;  // XORed into the byte; unused for bit flips

    friend bool operator==(const Mutation&, const Mutation&) = default;
};

/// "bit:<i>", "byte:<i>" or "byte:<i>:<mask>" (mask decimal or 0x-hex).
/// Throws Error{bad_request}.
Mutation parse_mutation(std::string_view spec);

/// Applies the mutations in order to the stored envelope of (roll, course)
/// under the local store rooted at `lds_root`. Throws Error{target_missing}
/// when the entry does not exist or an offset falls outside it.
void lds(const std::filesystem::path& lds_root, const std::string& roll, const std::string& course,
         std::span<const Mutation> mutations);

/// Same for one block frame of the chain stored in `ledger_dir`. Offsets
/// count from the start of the frame.
void ledger(const std::filesystem::path& ledger_dir, std::uint64_t block, std::span<const Mutation> mutations);

}  // namespace credsec::tamper
