#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "credsec/digest.hpp"
#include "credsec/dna.hpp"
#include "credsec/envelope.hpp"
#include "credsec/exec.hpp"

// Two-stage credential encryption: C2I digits are split into chunks, each
// chunk is RSA-encrypted and zero-padded to the decimal width of N, dummy
// digits are interleaved between consecutive chunks, and the resulting digit
// stream is converted to 4-bit BCD and DNA-encoded.
namespace credsec::m2fe {

inline constexpr std::size_t kDefaultChunkDigits = 300;

/// DNA-side key material carried alongside the RSA keys.
struct DnaMaterial {
    dna::Key key;
    int rule = 0;
    dna::Params params;
};

struct CredentialHash {
    Sha256 value{};

    std::string hex() const { return to_hex(value); }
    static CredentialHash of(std::span<const std::uint8_t> envelope_bytes) { return {sha256(envelope_bytes)}; }

    friend bool operator==(const CredentialHash&, const CredentialHash&) = default;
};

/// b = 1 iff the two digests are byte-equal.
int credential_verify(const CredentialHash& computed, const CredentialHash& stored);

struct EncryptOptions {
    std::size_t chunk_digits = kDefaultChunkDigits;
    Exec exec = Exec::parallel;
};

struct Sealed {
    Envelope envelope;
    Bytes bytes;
    CredentialHash hash;
};

/// Throws Error{unknown_character} or Error{chunk_too_wide} (10^k >= N).
Sealed encrypt(std::string_view credential, const mpz_class& e, const mpz_class& n, const DnaMaterial& dna,
               const EncryptOptions& options = {});

/// Any corruption of the cipher stream surfaces as IntegrityError, whose
/// cause() names the failing stage.
std::string decrypt(const Envelope& env, const mpz_class& d, const mpz_class& n, const DnaMaterial& dna,
                    Exec exec = Exec::parallel);

/// Payload bits the size law predicts: 4 * (n*D + (n-1)*dummy) with
/// n = ceil(digit_count / k).
std::uint64_t predicted_payload_bits(std::uint64_t digit_count, std::size_t chunk_digits, std::size_t cipher_width,
                                     const dna::Params& params);

// Stage kernels. Each has a serial reference loop and an OpenMP loop.
namespace kernels {

/// Splits a digit string into k-digit chunks; the last one may be shorter.
std::vector<std::string> split_chunks(std::string_view digits, std::size_t k);

/// RSA-encrypts every chunk, returning decimal strings padded to `width`.
std::vector<std::string> encrypt_chunks(std::span<const std::string> chunks, const mpz_class& e, const mpz_class& n,
                                        std::size_t width, Exec exec);

/// RSA-decrypts every cipher chunk; chunk i is left-padded to widths[i].
/// Throws IntegrityError when a cipher chunk is >= N or decrypts to a value
/// wider than its slot.
std::vector<std::string> decrypt_chunks(std::span<const std::string> cipher, const mpz_class& d, const mpz_class& n,
                                        std::span<const std::size_t> widths, Exec exec);

/// Per-digit 4-bit BCD.
dna::BitString digits_to_bits(std::string_view digits, Exec exec);

/// Inverse of digits_to_bits. Throws Error{corrupt_digit} for nibbles > 9 and
/// Error{truncated_stream} when the length is not a multiple of 4.
std::string bits_to_digits(std::string_view bits, Exec exec);

}  // namespace kernels

}  // namespace credsec::m2fe
