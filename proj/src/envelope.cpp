#include "credsec/envelope.hpp"

#include <algorithm>

#include "credsec/error.hpp"

namespace credsec::m2fe {
namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'S', 'E', 'C'};

int base_code(char base) {
    switch (base) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
    }
}

constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

template <typename T>
void put_be(Bytes& out, T value) {
    for (int shift = static_cast<int>(sizeof(T) * 8) - 8; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

template <typename T>
T get_be(std::span<const std::uint8_t> in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value = static_cast<T>(value << 8 | in[offset + i]);
    }
    return value;
}

}  // namespace

Bytes serialize(const Envelope& env) {
    Bytes out;
    out.reserve(kEnvelopeHeaderSize + (env.payload.size() + 3) / 4);
    for (auto b : kMagic) {
        out.push_back(b);
    }
    out.push_back(env.version);
    put_be<std::uint16_t>(out, env.chunk_digits);
    put_be<std::uint16_t>(out, env.cipher_width);
    put_be<std::uint64_t>(out, env.digit_count);
    put_be<std::uint64_t>(out, env.payload_bit_length());

    std::uint8_t acc = 0;
    int filled = 0;
    for (std::size_t i = 0; i < env.payload.size(); ++i) {
        const int code = base_code(env.payload[i]);
        if (code < 0) {
            throw Error(Errc::invalid_base, "envelope payload holds a non-ACGT symbol", i);
        }
        acc = static_cast<std::uint8_t>(acc << 2 | code);
        if (++filled == 4) {
            out.push_back(acc);
            acc = 0;
            filled = 0;
        }
    }
    if (filled != 0) {
        out.push_back(static_cast<std::uint8_t>(acc << (2 * (4 - filled))));
    }
    return out;
}

Envelope parse(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kEnvelopeHeaderSize) {
        if (bytes.size() >= 4 && !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
            throw Error(Errc::bad_magic, "envelope does not start with CSEC");
        }
        throw Error(Errc::length_mismatch, "envelope shorter than its header");
    }
    if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
        throw Error(Errc::bad_magic, "envelope does not start with CSEC");
    }
    Envelope env;
    env.version = bytes[4];
    if (env.version != kEnvelopeVersion) {
        throw Error(Errc::unsupported_version, "envelope version " + std::to_string(env.version));
    }
    env.chunk_digits = get_be<std::uint16_t>(bytes, 5);
    env.cipher_width = get_be<std::uint16_t>(bytes, 7);
    env.digit_count = get_be<std::uint64_t>(bytes, 9);
    const auto bit_length = get_be<std::uint64_t>(bytes, 17);
    if (bit_length % 2 != 0) {
        throw Error(Errc::non_canonical, "payload bit length is odd");
    }
    const std::size_t body = bytes.size() - kEnvelopeHeaderSize;
    if (bit_length / 8 + (bit_length % 8 != 0 ? 1 : 0) != body) {
        throw Error(Errc::length_mismatch, "payload length does not match its declared bit length");
    }
    const auto base_count = static_cast<std::size_t>(bit_length / 2);
    env.payload.resize(base_count);
    const auto payload = bytes.subspan(kEnvelopeHeaderSize);
    for (std::size_t i = 0; i < base_count; ++i) {
        const int shift = 6 - 2 * static_cast<int>(i % 4);
        env.payload[i] = kBases[(payload[i / 4] >> shift) & 3];
    }
    if (const std::size_t used = base_count % 4; used != 0) {
        const auto mask = static_cast<std::uint8_t>(0xFFu >> (2 * used));
        if ((payload.back() & mask) != 0) {
            throw Error(Errc::non_canonical, "payload padding bits are not zero");
        }
    }
    return env;
}

}  // namespace credsec::m2fe
