#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "credsec/exec.hpp"
#include "credsec/random.hpp"

// DNA stage: key derivation from (S, T), the 24 base-mapping rules,
// XOR-then-map encoding, and dummy-digit generation/removal.
namespace credsec::dna {

/// Bit strings are '0'/'1' characters; base strings use 'A', 'C', 'G', 'T'.
using BitString = std::string;

struct Params {
    std::uint64_t s = 0;
    std::uint64_t t = 0;
};

inline constexpr unsigned kDefaultSecurityBits = 16;
inline constexpr unsigned kMaxSecurityBits = 16;

/// Throws Error{invalid_params} unless S > T >= 2.
void validate(const Params& params);

/// ln(S)*T^2 + ln(T)*S^2 in double precision.
double key_real(const Params& params);

/// False when key_real lies so close to an integer that its floor could
/// differ between libm implementations.
bool floor_stable(const Params& params);

/// Samples T in [2, 2^K - 2] and S in (T, 2^K - 1], rejecting pairs whose key
/// derivation is not floor-stable. K must be in [2, kMaxSecurityBits].
Params setup(unsigned security_bits, RandomSource& rng);

struct Key {
    BitString bits;
};

/// DK = binary(floor(ln(S)*T^2 + ln(T)*S^2)), most significant bit first.
Key keygen(const Params& params);

/// One of the 4! bijections {00,01,10,11} -> {A,C,G,T}. Rules are numbered in
/// lexicographic order of the base sequence for 00,01,10,11, so rule 0 maps
/// 00->A 01->C 10->G 11->T and rule 23 maps 00->T 01->G 10->C 11->A.
struct Rule {
    int id = 0;
    std::array<char, 4> base_of{};   // indexed by 2-bit value
    std::array<std::int8_t, 256> value_of{};  // base char -> 2-bit value, -1 otherwise
};

inline constexpr int kRuleCount = 24;

/// Throws Error{invalid_params} unless 0 <= id < 24.
const Rule& rule(int id);

/// z = bits XOR (key repeated to length); one base per 2-bit pair of z.
/// Throws Error{odd_bit_length}.
std::string encode(std::string_view bits, const Key& key, const Rule& rule, Exec exec = Exec::serial);

/// Inverse of encode. Throws Error{invalid_base} with the base position.
BitString decode(std::string_view bases, const Key& key, const Rule& rule, Exec exec = Exec::serial);

enum class Side { left, right };

struct DummySpec {
    std::size_t alpha = 0;       // len(C_{i-1})
    std::size_t beta = 0;        // len(C_i)
    std::uint64_t lambda = 0;    // round(sqrt((alpha+beta)^2 / (alpha*beta)))
    std::uint64_t delta = 0;     // (lambda * S) mod T
    std::size_t delta_eff = 0;   // delta clamped to the source chunk length
    int psi = 1;                 // 1: leading digits, 2: trailing digits
    Side source = Side::left;    // right iff lambda is odd
    std::string gamma;           // the dummy digits
};

/// Throws Error{empty_chunk} or Error{invalid_params}.
DummySpec dum_gen(std::string_view left, std::string_view right, const Params& params);

/// Dummy length inserted between two chunks of equal `width`.
std::size_t dummy_length(std::size_t width, const Params& params);

/// C_1 || G_2 || C_2 || ... || G_n || C_n with G_i = dum_gen(C_{i-1}, C_i).
std::string interleave(std::span<const std::string> chunks, const Params& params);

/// Splits an interleaved stream of `width`-digit chunks, checking every dummy
/// against its recomputed value. Throws Error{dummy_mismatch} (position = stream
/// offset of the first differing digit) or Error{truncated_stream}.
std::vector<std::string> dum_discard(std::string_view stream, std::size_t width, const Params& params);

}  // namespace credsec::dna
