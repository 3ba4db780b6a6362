#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "credsec/random.hpp"

// Textbook RSA without padding. Big-integer arithmetic comes from GMP; prime
// generation, primality testing and modular exponentiation live here.
namespace credsec::rsa {

inline constexpr unsigned kDefaultLambda = 1024;
inline constexpr unsigned kMinLambda = 16;
inline constexpr int kMillerRabinRounds = 40;
inline const mpz_class kDefaultExponent = 65537;

struct Params {
    mpz_class p;
    mpz_class q;
    mpz_class n;
    unsigned lambda = 0;
};

struct Keys {
    mpz_class e;
    mpz_class d;
};

enum class ExponentMode {
    fixed_65537,  // e = 65537
    random_full,  // e uniform over full-size odd values coprime to lcm(p-1, q-1)
};

/// Counts the multiplications a modular exponentiation performed.
struct ModexpStats {
    std::uint64_t squarings = 0;
    std::uint64_t multiplications = 0;
};

/// Left-to-right square-and-multiply. `modulus` must be positive and `base`
/// non-negative.
mpz_class modexp(const mpz_class& base, const mpz_class& exponent, const mpz_class& modulus,
                 ModexpStats* stats = nullptr);

/// Miller-Rabin with `rounds` random witnesses after small-prime trial division.
bool is_probable_prime(const mpz_class& n, RandomSource& rng, int rounds = kMillerRabinRounds);

/// Random prime with exactly `bits` bits and the top two bits set. When
/// `exponent` is non-zero the prime also satisfies gcd(exponent, p - 1) = 1.
mpz_class random_prime(unsigned bits, RandomSource& rng, const mpz_class& exponent = 0);

/// Fresh p != q of about lambda/2 bits each; N = p*q has exactly lambda bits.
/// Primes are chosen so that the default exponent 65537 is always usable.
Params setup(unsigned lambda, RandomSource& rng);

/// Builds parameters from known primes. Throws Error{invalid_params} when
/// either value is composite or p == q.
Params from_primes(const mpz_class& p, const mpz_class& q);

/// lcm(p - 1, q - 1).
mpz_class carmichael(const Params& params);

Keys keygen(const Params& params, RandomSource& rng, ExponentMode mode = ExponentMode::fixed_65537);

/// Keys for a caller-chosen public exponent; d = e^-1 mod lcm(p-1, q-1).
/// Throws Error{invalid_params} when gcd(e, lcm) != 1.
Keys keygen_with_exponent(const Params& params, const mpz_class& e);

/// c = m^e mod N. Throws Error{message_too_large} unless 0 <= m < N.
mpz_class encrypt(const mpz_class& m, const mpz_class& e, const mpz_class& n, ModexpStats* stats = nullptr);

/// m = c^d mod N. Throws Error{message_too_large} unless 0 <= c < N.
mpz_class decrypt(const mpz_class& c, const mpz_class& d, const mpz_class& n, ModexpStats* stats = nullptr);

/// Number of decimal digits of n (n > 0).
std::size_t decimal_width(const mpz_class& n);

mpz_class from_decimal(const std::string& digits);

}  // namespace credsec::rsa
