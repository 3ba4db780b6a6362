#include "credsec/codec.hpp"

#include "credsec/error.hpp"

namespace credsec::codec {
namespace {

constexpr std::array<unsigned char, 256> build_reverse() {
    std::array<unsigned char, 256> table{};
    for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
        table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<unsigned char>(i + 1);
    }
    return table;
}

constexpr auto kReverse = build_reverse();

}  // namespace

int code_of(char ch) noexcept {
    return kReverse[static_cast<unsigned char>(ch)];
}

char char_of(int code) noexcept {
    if (code < 1 || code > kAlphabetSize) {
        return '\0';
    }
    return kAlphabet[static_cast<std::size_t>(code - 1)];
}

std::string c2i_encode(std::string_view text) {
    std::string out(text.size() * 2, '0');
    for (std::size_t i = 0; i < text.size(); ++i) {
        const int code = code_of(text[i]);
        if (code == 0) {
            throw Error(Errc::unknown_character,
                        "character outside the C2I alphabet at position " + std::to_string(i), i);
        }
        out[2 * i] = static_cast<char>('0' + code / 10);
        out[2 * i + 1] = static_cast<char>('0' + code % 10);
    }
    return out;
}

std::string c2i_decode(std::string_view digits) {
    if (digits.size() % 2 != 0) {
        throw Error(Errc::odd_length, "C2I digit string has odd length " + std::to_string(digits.size()));
    }
    std::string out(digits.size() / 2, '\0');
    for (std::size_t g = 0; g < out.size(); ++g) {
        const char hi = digits[2 * g];
        const char lo = digits[2 * g + 1];
        const bool numeric = hi >= '0' && hi <= '9' && lo >= '0' && lo <= '9';
        const int code = numeric ? (hi - '0') * 10 + (lo - '0') : 0;
        const char ch = char_of(code);
        if (ch == '\0') {
            throw Error(Errc::code_out_of_range, "C2I group " + std::to_string(g) + " is not in 01..95", g);
        }
        out[g] = ch;
    }
    return out;
}

std::string table_listing() {
    std::string out;
    for (int code = 1; code <= kAlphabetSize; ++code) {
        const char ch = char_of(code);
        if (ch == ' ') {
            out += "SPACE";
        } else {
            out += ch;
        }
        out += '\t';
        if (code < 10) {
            out += '0';
        }
        out += std::to_string(code);
        out += '\n';
    }
    return out;
}

}  // namespace credsec::codec
