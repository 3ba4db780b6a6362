#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace credsec {

using Bytes = std::vector<std::uint8_t>;
using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> data);
Sha256 sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> data);
/// Throws Error{bad_request} on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);
Sha256 digest_from_hex(std::string_view hex);

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws Error{bad_request} on malformed input.
Bytes base64_decode(std::string_view text);

/// Constant-time equality for equal-length buffers.
bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace credsec
