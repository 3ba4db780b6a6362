#include "credsec/random.hpp"

#include <openssl/rand.h>

#include <stdexcept>
#include <vector>

namespace credsec {

std::uint64_t RandomSource::next_u64() {
    std::uint8_t buf[8];
    fill(buf);
    std::uint64_t v = 0;
    for (auto b : buf) {
        v = (v << 8) | b;
    }
    return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) {
        throw std::invalid_argument("uniform: empty range");
    }
    const std::uint64_t span = hi - lo;
    if (span == UINT64_MAX) {
        return next_u64();
    }
    const std::uint64_t range = span + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return lo + v % range;
}

mpz_class RandomSource::bits(unsigned nbits) {
    std::vector<std::uint8_t> buf((nbits + 7) / 8);
    fill(buf);
    if (const unsigned extra = buf.size() * 8 - nbits; extra != 0 && !buf.empty()) {
        buf[0] &= static_cast<std::uint8_t>(0xFFu >> extra);
    }
    mpz_class out;
    mpz_import(out.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    return out;
}

mpz_class RandomSource::below(const mpz_class& bound) {
    if (bound <= 0) {
        throw std::invalid_argument("below: bound must be positive");
    }
    const unsigned nbits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
    mpz_class v;
    do {
        v = bits(nbits);
    } while (v >= bound);
    return v;
}

std::string RandomSource::hex_token(std::size_t nbytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::vector<std::uint8_t> buf(nbytes);
    fill(buf);
    std::string out;
    out.reserve(nbytes * 2);
    for (auto b : buf) {
        out += kHex[b >> 4];
        out += kHex[b & 0xF];
    }
    return out;
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
    if (out.empty()) {
        return;
    }
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = engine_();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v);
            v >>= 8;
        }
    }
}

}  // namespace credsec
