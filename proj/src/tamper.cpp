#include "credsec/tamper.hpp"

#include <charconv>

#include "credsec/error.hpp"
#include "credsec/lds.hpp"
#include "credsec/ledger_maintenance.hpp"

namespace credsec::tamper {

namespace {

std::uint64_t number(std::string_view text, std::string_view spec) {
    int base = 10;
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
        base = 16;
    }
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
        throw Error(Errc::bad_request, "bad mutation \"" + std::string(spec) + "\"");
    }
    return v;
}

std::uint64_t byte_index(const Mutation& m) { return m.kind == Mutation::Kind::bit ? m.offset / 8 : m.offset; }

}  // namespace

Mutation parse_mutation(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw Error(Errc::bad_request, "mutation must look like bit:<i> or byte:<i>[:<mask>]");
    }
    const std::string_view kind = spec.substr(0, colon);
    std::string_view rest = spec.substr(colon + 1);
    Mutation m;
    if (kind == "bit") {
        m.kind = Mutation::Kind::bit;
        m.offset = number(rest, spec);
        return m;
    }
    if (kind != "byte") {
        throw Error(Errc::bad_request, "unknown mutation kind \"" + std::string(kind) + "\"");
    }
    const auto second = rest.find(':');
    m.offset = number(rest.substr(0, second), spec);
    if (second != std::string_view::npos) {
        const std::uint64_t mask = number(rest.substr(second + 1), spec);
        if (mask == 0 || mask > 0xff) {
            throw Error(Errc::bad_request, "mask must be in 1..255");
        }
        m.mask = static_cast<std::uint8_t>(mask);
    }
    return m;
}

void lds(const std::filesystem::path& lds_root, const std::string& roll, const std::string& course,
         std::span<const Mutation> mutations) {
    if (!std::filesystem::is_directory(lds_root)) {
        throw Error(Errc::target_missing, "no local store at " + lds_root.string());
    }
    lds::LocalStore store(lds_root);
    Bytes bytes;
    try {
        bytes = store.get(roll, course);
    } catch (const Error& e) {
        if (e.code() != Errc::not_found) {
            throw;
        }
        throw Error(Errc::target_missing, "no stored credential for " + roll + "/" + course);
    }
    for (const auto& m : mutations) {
        const std::uint64_t at = byte_index(m);
        if (at >= bytes.size()) {
            throw Error(Errc::target_missing, "offset past the end of " + roll + "/" + course);
        }
        if (m.kind == Mutation::Kind::bit) {
            bytes[at] ^= static_cast<std::uint8_t>(0x80u >> (m.offset % 8));
        } else {
            bytes[at] ^= m.mask;
        }
    }
    if (!mutations.empty()) {
        store.overwrite_raw(roll, course, bytes);
    }
}

void ledger(const std::filesystem::path& ledger_dir, std::uint64_t block, std::span<const Mutation> mutations) {
    const std::size_t size = ledger::maintenance::frame_size(ledger_dir, block);
    for (const auto& m : mutations) {
        if (byte_index(m) >= size) {
            throw Error(Errc::target_missing, "offset past the end of block " + std::to_string(block));
        }
    }
    for (const auto& m : mutations) {
        if (m.kind == Mutation::Kind::bit) {
            ledger::maintenance::flip_bit(ledger_dir, block, m.offset);
        } else {
            ledger::maintenance::xor_byte(ledger_dir, block, m.offset, m.mask);
        }
    }
}

}  // namespace credsec::tamper
