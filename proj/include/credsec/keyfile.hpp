#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <gmpxx.h>
#include <json.hpp>

#include "credsec/m2fe.hpp"

namespace credsec {

/// Key material for one student. The CTA holds all fields; the student copy
/// omits p and q; the instructor copy additionally omits d.
///
/// JSON form: integers as decimal strings, DK as a bit string:
///   {"roll": "...", "p": "...", "q": "...", "N": "...", "e": "...", "d": "...",
///    "DK": "1001...", "rule": 5, "S": 1234, "T": 567}
struct KeyBundle {
    std::string roll;
    mpz_class n;
    mpz_class e;
    std::optional<mpz_class> d;
    std::optional<mpz_class> p;
    std::optional<mpz_class> q;
    m2fe::DnaMaterial dna;

    KeyBundle student_view() const;
    KeyBundle instructor_view() const;

    /// Throws Error{bad_request} when d is absent.
    const mpz_class& private_exponent() const;
};

nlohmann::json to_json(const KeyBundle& bundle);

/// Validates rule range, S > T >= 2 and that DK matches (S, T).
/// Throws Error{bad_request}.
KeyBundle key_bundle_from_json(const nlohmann::json& j);

void save_key_file(const std::filesystem::path& path, const KeyBundle& bundle);
KeyBundle load_key_file(const std::filesystem::path& path);

}  // namespace credsec
