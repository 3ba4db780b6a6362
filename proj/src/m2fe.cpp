#include "credsec/m2fe.hpp"

#include "credsec/codec.hpp"
#include "credsec/error.hpp"
#include "credsec/rsa.hpp"

namespace credsec::m2fe {

int credential_verify(const CredentialHash& computed, const CredentialHash& stored) {
    return constant_time_equal(computed.value, stored.value) ? 1 : 0;
}

namespace kernels {

std::vector<std::string> split_chunks(std::string_view digits, std::size_t k) {
    if (k == 0) {
        throw Error(Errc::invalid_params, "chunk width must be positive");
    }
    std::vector<std::string> out;
    out.reserve((digits.size() + k - 1) / k);
    for (std::size_t pos = 0; pos < digits.size(); pos += k) {
        out.emplace_back(digits.substr(pos, k));
    }
    return out;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

template <typename Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
    const auto n = static_cast<std::ptrdiff_t>(count);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(static_cast<std::size_t>(i));
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(static_cast<std::size_t>(i));
        }
    }
}

}  // namespace

std::vector<std::string> encrypt_chunks(std::span<const std::string> chunks, const mpz_class& e, const mpz_class& n,
                                        std::size_t width, Exec exec) {
    std::vector<mpz_class> values(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        values[i] = rsa::from_decimal(chunks[i]);
        if (values[i] >= n) {
            throw Error(Errc::chunk_too_wide, "chunk value does not fit below N", i);
        }
    }
    std::vector<std::string> out(chunks.size());
    for_each_index(chunks.size(), exec, [&](std::size_t i) {
        out[i] = pad_left(rsa::modexp(values[i], e, n).get_str(10), width);
    });
    return out;
}

std::vector<std::string> decrypt_chunks(std::span<const std::string> cipher, const mpz_class& d, const mpz_class& n,
                                        std::span<const std::size_t> widths, Exec exec) {
    if (widths.size() != cipher.size()) {
        throw IntegrityError(Errc::truncated_stream, "cipher chunk count does not match the envelope");
    }
    std::vector<mpz_class> values(cipher.size());
    for (std::size_t i = 0; i < cipher.size(); ++i) {
        values[i] = rsa::from_decimal(cipher[i]);
        if (values[i] >= n) {
            throw IntegrityError(Errc::message_too_large, "cipher chunk " + std::to_string(i) + " is not below N", i);
        }
    }
    std::vector<std::string> out(cipher.size());
    for_each_index(cipher.size(), exec, [&](std::size_t i) {
        out[i] = rsa::modexp(values[i], d, n).get_str(10);
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() > widths[i]) {
            throw IntegrityError(Errc::code_out_of_range,
                                 "chunk " + std::to_string(i) + " decrypts wider than its slot", i);
        }
        out[i] = pad_left(out[i], widths[i]);
    }
    return out;
}

dna::BitString digits_to_bits(std::string_view digits, Exec exec) {
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < '0' || digits[i] > '9') {
            throw Error(Errc::corrupt_digit, "not a decimal digit", i);
        }
    }
    dna::BitString out(digits.size() * 4, '0');
    for_each_index(digits.size(), exec, [&](std::size_t i) {
        const int v = digits[i] - '0';
        for (int b = 0; b < 4; ++b) {
            out[4 * i + static_cast<std::size_t>(b)] = static_cast<char>('0' + ((v >> (3 - b)) & 1));
        }
    });
    return out;
}

std::string bits_to_digits(std::string_view bits, Exec exec) {
    if (bits.size() % 4 != 0) {
        throw Error(Errc::truncated_stream, "bit stream is not a whole number of digits", bits.size());
    }
    std::string out(bits.size() / 4, '\0');
    for_each_index(out.size(), exec, [&](std::size_t i) {
        int v = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            v = v << 1 | (bits[4 * i + b] == '1' ? 1 : 0);
        }
        out[i] = v <= 9 ? static_cast<char>('0' + v) : '?';
    });
    if (const auto bad = out.find('?'); bad != std::string::npos) {
        throw Error(Errc::corrupt_digit, "nibble above 9 in BCD stream", bad);
    }
    return out;
}

}  // namespace kernels

std::uint64_t predicted_payload_bits(std::uint64_t digit_count, std::size_t chunk_digits, std::size_t cipher_width,
                                     const dna::Params& params) {
    const std::uint64_t n = (digit_count + chunk_digits - 1) / chunk_digits;
    if (n == 0) {
        return 0;
    }
    const std::uint64_t gap = dna::dummy_length(cipher_width, params);
    return 4 * (n * cipher_width + (n - 1) * gap);
}

Sealed encrypt(std::string_view credential, const mpz_class& e, const mpz_class& n, const DnaMaterial& material,
               const EncryptOptions& options) {
    dna::validate(material.params);
    const dna::Rule& rule = dna::rule(material.rule);
    const std::size_t k = options.chunk_digits;
    const std::size_t width = rsa::decimal_width(n);
    if (k == 0 || k > UINT16_MAX || width > UINT16_MAX) {
        throw Error(Errc::invalid_params, "chunk or cipher width does not fit the envelope header");
    }
    mpz_class limit;
    mpz_ui_pow_ui(limit.get_mpz_t(), 10, k);
    if (limit >= n) {
        throw Error(Errc::chunk_too_wide, "10^k must be below N");
    }

    const std::string digits = codec::c2i_encode(credential);
    const auto chunks = kernels::split_chunks(digits, k);
    const auto cipher = kernels::encrypt_chunks(chunks, e, n, width, options.exec);
    const std::string stream = dna::interleave(cipher, material.params);
    const dna::BitString bits = kernels::digits_to_bits(stream, options.exec);

    Sealed out;
    out.envelope.chunk_digits = static_cast<std::uint16_t>(k);
    out.envelope.cipher_width = static_cast<std::uint16_t>(width);
    out.envelope.digit_count = digits.size();
    out.envelope.payload = dna::encode(bits, material.key, rule, options.exec);
    out.bytes = serialize(out.envelope);
    out.hash = CredentialHash::of(out.bytes);
    return out;
}

std::string decrypt(const Envelope& env, const mpz_class& d, const mpz_class& n, const DnaMaterial& material,
                    Exec exec) {
    dna::validate(material.params);
    const dna::Rule& rule = dna::rule(material.rule);
    if (env.digit_count == 0) {
        if (!env.payload.empty()) {
            throw IntegrityError(Errc::length_mismatch, "empty credential with a non-empty payload");
        }
        return {};
    }
    if (env.digit_count % 2 != 0) {
        throw IntegrityError(Errc::odd_length, "digit count is odd");
    }
    if (env.chunk_digits == 0) {
        throw IntegrityError(Errc::invalid_params, "chunk width is zero");
    }
    if (env.cipher_width != rsa::decimal_width(n)) {
        throw IntegrityError(Errc::invalid_params, "cipher width does not match the key modulus");
    }

    try {
        const dna::BitString bits = dna::decode(env.payload, material.key, rule, exec);
        const std::string stream = kernels::bits_to_digits(bits, exec);
        const auto cipher = dna::dum_discard(stream, env.cipher_width, material.params);

        const std::uint64_t k = env.chunk_digits;
        const std::uint64_t count = (env.digit_count + k - 1) / k;
        if (cipher.size() != count) {
            throw IntegrityError(Errc::truncated_stream, "cipher stream holds " + std::to_string(cipher.size()) +
                                                             " chunks, expected " + std::to_string(count));
        }
        std::vector<std::size_t> widths(cipher.size(), env.chunk_digits);
        const std::uint64_t tail = env.digit_count % k;
        widths.back() = static_cast<std::size_t>(tail == 0 ? k : tail);

        const auto plain = kernels::decrypt_chunks(cipher, d, n, widths, exec);
        std::string digits;
        digits.reserve(env.digit_count);
        for (const auto& chunk : plain) {
            digits += chunk;
        }
        return codec::c2i_decode(digits);
    } catch (const IntegrityError&) {
        throw;
    } catch (const Error& err) {
        throw IntegrityError(err.code(), err.detail(), err.position());
    }
}

}  // namespace credsec::m2fe
