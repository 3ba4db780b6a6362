#include <doctest.h>

#include <random>

#include "credsec/envelope.hpp"
#include "credsec/error.hpp"

using namespace credsec;
using m2fe::Envelope;

namespace {

Envelope random_envelope(std::mt19937_64& rng) {
    Envelope env;
    env.chunk_digits = static_cast<std::uint16_t>(rng());
    env.cipher_width = static_cast<std::uint16_t>(rng());
    env.digit_count = rng();
    env.payload.resize(rng() % 257);
    for (auto& b : env.payload) b = "ACGT"[rng() % 4];
    return env;
}

Errc failure(const Bytes& bytes) {
    try {
        m2fe::parse(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::bad_request;
}

}  // namespace

TEST_CASE("serialize/parse is a bijection on random envelopes") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 500; ++i) {
        const Envelope env = random_envelope(rng);
        const Bytes bytes = m2fe::serialize(env);
        CHECK(bytes.size() == m2fe::kEnvelopeHeaderSize + (env.payload.size() + 3) / 4);
        CHECK(m2fe::parse(bytes) == env);
        CHECK(m2fe::serialize(m2fe::parse(bytes)) == bytes);
    }
}

TEST_CASE("header layout is big-endian") {
    Envelope env;
    env.chunk_digits = 0x0102;
    env.cipher_width = 0x0304;
    env.digit_count = 0x05060708090A0B0Cull;
    env.payload = "ACGTT";
    const Bytes b = m2fe::serialize(env);
    const Bytes expected = {'C', 'S', 'E', 'C', 1,    0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0A,
                            0x0B, 0x0C, 0,   0,   0,    0,    0,    0,    0,    10,   0x1B, 0xC0};
    CHECK(b == expected);
}

TEST_CASE("parse errors") {
    Envelope env;
    env.digit_count = 4;
    env.payload = "ACGTAC";
    const Bytes good = m2fe::serialize(env);

    CHECK(failure(Bytes(good.begin(), good.end() - 1)) == Errc::length_mismatch);
    CHECK(failure(Bytes(good.begin(), good.begin() + 10)) == Errc::length_mismatch);
    CHECK(failure({}) == Errc::length_mismatch);

    Bytes longer = good;
    longer.push_back(0);
    CHECK(failure(longer) == Errc::length_mismatch);

    Bytes magic = good;
    magic[0] = 'X';
    CHECK(failure(magic) == Errc::bad_magic);

    Bytes version = good;
    version[4] = 2;
    CHECK(failure(version) == Errc::unsupported_version);

    Bytes padding = good;
    padding.back() |= 0x01;
    CHECK(failure(padding) == Errc::non_canonical);

    Bytes odd_bits = good;
    odd_bits[24] ^= 0x01;
    CHECK(failure(odd_bits) == Errc::non_canonical);
}

TEST_CASE("empty envelope") {
    const Envelope env;
    const Bytes b = m2fe::serialize(env);
    CHECK(b.size() == m2fe::kEnvelopeHeaderSize);
    CHECK(m2fe::parse(b) == env);
}
