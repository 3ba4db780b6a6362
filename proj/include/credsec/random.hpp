#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <gmpxx.h>

namespace credsec {

/// Source of random bytes. Key generation, nonces and session tokens all draw
/// from one of these so tests can substitute a seeded generator.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    std::uint64_t next_u64();
    /// Uniform integer in [lo, hi], inclusive.
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
    /// Uniform integer with exactly `bits` random bits (top bit not forced).
    mpz_class bits(unsigned bits);
    /// Uniform integer in [0, bound).
    mpz_class below(const mpz_class& bound);
    /// Lowercase hex of `bytes` random bytes.
    std::string hex_token(std::size_t bytes);
};

/// OS entropy through OpenSSL's CSPRNG.
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Reproducible stream for tests and benchmarks. Not for key material.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 engine_;
};

}  // namespace credsec
