#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "credsec/dna.hpp"
#include "credsec/keyfile.hpp"
#include "credsec/random.hpp"
#include "credsec/rsa.hpp"

namespace credsec::authority {

struct Config {
    unsigned lambda = rsa::kDefaultLambda;
    unsigned dna_bits = dna::kDefaultSecurityBits;
    rsa::ExponentMode exponent_mode = rsa::ExponentMode::fixed_65537;
};

struct SystemParams {
    rsa::Params rsa;
    dna::Params dna;
};

/// What the CTA forwards to the CMS about a newly registered student.
/// Carries only public material.
struct StudentNotice {
    std::string email;
    std::string roll;
    mpz_class e;
    mpz_class n;
};

class StudentSink {
public:
    virtual ~StudentSink() = default;
    virtual void accept_student(const StudentNotice& notice) = 0;
};

struct Nonce {
    std::string value;  // 32 hex chars, 128 bits
    std::string bound_to;
    bool used = false;
};

/// Certification authority: parameter setup, key generation and identity
/// registration. Email addresses are taken as already verified.
class CertificationAuthority {
public:
    /// `state_file`, when set, persists registrations as JSON across restarts.
    CertificationAuthority(Config config, RandomSource& rng, StudentSink* sink = nullptr,
                           std::optional<std::filesystem::path> state_file = std::nullopt);

    SystemParams setup();

    /// Throws Error{duplicate_instructor} when the email or ID is taken.
    Nonce register_instructor(const std::string& email, const std::string& id);

    /// Issues a fresh key bundle (student view, without p and q) and forwards
    /// (e, N, email, roll) to the sink. Throws Error{duplicate_student}.
    KeyBundle register_student(const std::string& email, const std::string& roll);

    /// Marks the instructor's nonce as consumed for registration. Returns false
    /// when (email, id, nonce) does not match or the nonce was already redeemed.
    bool redeem_registration_nonce(const std::string& email, const std::string& id, const std::string& nonce);

    /// Instructor copy of a student's keys (no d), released only against the
    /// instructor's nonce. Throws Error{auth_failed} or Error{not_found}.
    KeyBundle instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) const;

    std::optional<Nonce> nonce_for(const std::string& id) const;

    void set_sink(StudentSink* sink) { sink_ = sink; }

private:
    struct Instructor {
        std::string email;
        Nonce nonce;
    };
    struct Student {
        std::string email;
        KeyBundle keys;  // CTA copy including p and q
    };

    void save_locked() const;
    void load();

    Config config_;
    RandomSource& rng_;
    StudentSink* sink_;
    std::optional<std::filesystem::path> state_file_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Instructor> instructors_;  // by ID
    std::unordered_map<std::string, Student> students_;        // by roll
};

}  // namespace credsec::authority
