#pragma once

#include <array>
#include <string>
#include <string_view>

// Character-to-integer (C2I) codec: each of the 95 printable credential
// characters maps to a two-digit decimal code 01..95.
namespace credsec::codec {

inline constexpr int kAlphabetSize = 95;

/// Canonical ordering; the character at index i has code i + 1.
inline constexpr std::string_view kAlphabet =
    "0123456789"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "abcdefghijklmnopqrstuvwxyz"
    " !\"#%&'()*+,-./:;<=>?@$^_[\\]`~{|}";

static_assert(kAlphabet.size() == kAlphabetSize);

/// Code for `ch`, or 0 when `ch` is outside the alphabet.
int code_of(char ch) noexcept;

/// Character for `code` in 1..95, or '\0' otherwise.
char char_of(int code) noexcept;

/// Throws Error{unknown_character} with the offending position.
std::string c2i_encode(std::string_view text);

/// Throws Error{odd_length} or Error{code_out_of_range} with the group index.
std::string c2i_decode(std::string_view digits);

/// Two-column "char<TAB>code" listing of the full table, one row per line.
/// Space is written as the word "SPACE" so the file stays unambiguous.
std::string table_listing();

}  // namespace credsec::codec
