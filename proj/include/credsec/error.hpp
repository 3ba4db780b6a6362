#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace credsec {

enum class Errc {
    unknown_character,
    odd_length,
    code_out_of_range,
    message_too_large,
    invalid_params,
    empty_chunk,
    dummy_mismatch,
    truncated_stream,
    odd_bit_length,
    invalid_base,
    corrupt_digit,
    chunk_too_wide,
    integrity,
    bad_magic,
    unsupported_version,
    length_mismatch,
    non_canonical,
    record_hash_mismatch,
    persistence_failure,
    not_found,
    invalid_key,
    duplicate_instructor,
    duplicate_student,
    auth_failed,
    hash_mismatch,
    forbidden,
    target_missing,
    bad_request,
    unavailable,
};

std::string_view to_string(Errc code);

/// Inverse of to_string; nullopt for unknown names.
std::optional<Errc> errc_from_string(std::string_view name);

/// Base exception for every failure the library reports. `position()` is set
/// for errors that point at an offset in their input (a character, a digit
/// group, a base or a stream digit).
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, std::optional<std::size_t> position = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> position() const noexcept { return position_; }
    /// Message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
    std::optional<std::size_t> position_;
};

/// Raised by credential decryption when the cipher stream is corrupt.
/// `cause()` carries the lower-level failure (dummy mismatch, truncation,
/// out-of-range code, ...).
class IntegrityError : public Error {
public:
    IntegrityError(Errc cause, std::string message, std::optional<std::size_t> position = std::nullopt);

    Errc cause() const noexcept { return cause_; }

private:
    Errc cause_;
};

}  // namespace credsec
