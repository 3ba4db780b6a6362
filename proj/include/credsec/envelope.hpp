#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "credsec/digest.hpp"

namespace credsec::m2fe {

inline constexpr std::uint8_t kEnvelopeVersion = 1;
inline constexpr std::size_t kEnvelopeHeaderSize = 4 + 1 + 2 + 2 + 8 + 8;

/// Cipher credential plus what decryption needs to undo chunking.
///
/// Wire layout, big-endian:
///   "CSEC" | version u8 | chunk_digits u16 | cipher_width u16 |
///   digit_count u64 | payload_bit_length u64 | payload
/// The payload packs one base per 2 bits (A=00 C=01 G=10 T=11, independent of
/// the DNA rule), most significant bits first, zero-padded to a byte.
struct Envelope {
    std::uint8_t version = kEnvelopeVersion;
    std::uint16_t chunk_digits = 0;
    std::uint16_t cipher_width = 0;
    std::uint64_t digit_count = 0;
    std::string payload;  // bases

    std::uint64_t payload_bit_length() const { return 2 * static_cast<std::uint64_t>(payload.size()); }

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

Bytes serialize(const Envelope& env);

/// Throws Error{length_mismatch}, Error{bad_magic}, Error{unsupported_version}
/// or Error{non_canonical} (odd bit length or non-zero padding bits).
Envelope parse(std::span<const std::uint8_t> bytes);

}  // namespace credsec::m2fe
