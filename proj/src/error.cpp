#include "credsec/error.hpp"

#include <utility>

namespace credsec {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::unknown_character: return "UnknownCharacter";
    case Errc::odd_length: return "OddLength";
    case Errc::code_out_of_range: return "CodeOutOfRange";
    case Errc::message_too_large: return "MessageTooLarge";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::empty_chunk: return "EmptyChunk";
    case Errc::dummy_mismatch: return "DummyMismatch";
    case Errc::truncated_stream: return "TruncatedStream";
    case Errc::odd_bit_length: return "OddBitLength";
    case Errc::invalid_base: return "InvalidBase";
    case Errc::corrupt_digit: return "CorruptDigit";
    case Errc::chunk_too_wide: return "ChunkTooWide";
    case Errc::integrity: return "IntegrityError";
    case Errc::bad_magic: return "BadMagic";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::non_canonical: return "NonCanonical";
    case Errc::record_hash_mismatch: return "RecordHashMismatch";
    case Errc::persistence_failure: return "PersistenceFailure";
    case Errc::not_found: return "NotFound";
    case Errc::invalid_key: return "InvalidKey";
    case Errc::duplicate_instructor: return "DuplicateInstructor";
    case Errc::duplicate_student: return "DuplicateStudent";
    case Errc::auth_failed: return "AuthFailed";
    case Errc::hash_mismatch: return "HashMismatch";
    case Errc::forbidden: return "Forbidden";
    case Errc::target_missing: return "TargetMissing";
    case Errc::bad_request: return "BadRequest";
    case Errc::unavailable: return "Unavailable";
    }
    return "Unknown";
}

std::optional<Errc> errc_from_string(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(Errc::unavailable); ++i) {
        const auto code = static_cast<Errc>(i);
        if (to_string(code) == name) {
            return code;
        }
    }
    return std::nullopt;
}

Error::Error(Errc code, std::string message, std::optional<std::size_t> position)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(std::move(message)),
      position_(position) {}

IntegrityError::IntegrityError(Errc cause, std::string message, std::optional<std::size_t> position)
    : Error(Errc::integrity, std::string(to_string(cause)) + ": " + message, position),
      cause_(cause) {}

}  // namespace credsec
