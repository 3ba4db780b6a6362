#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "credsec/authority.hpp"
#include "credsec/lds.hpp"
#include "credsec/ledger.hpp"
#include "credsec/m2fe.hpp"
#include "credsec/password.hpp"

// Credential management service: registration and login gatekeeping, upload
// to the local store and the ledger, retrieval and recovery. It sees only
// envelope bytes and digests, never d or DK.
namespace credsec::cms {

/// CMS-side view of the CTA, used to check an instructor's nonce once at
/// registration.
class AuthorityLink {
public:
    virtual ~AuthorityLink() = default;
    virtual bool redeem_registration_nonce(const std::string& email, const std::string& id,
                                           const std::string& nonce) = 0;
};

/// In-process link to a CertificationAuthority.
class LocalAuthorityLink final : public AuthorityLink {
public:
    explicit LocalAuthorityLink(authority::CertificationAuthority& cta) : cta_(cta) {}
    bool redeem_registration_nonce(const std::string& email, const std::string& id,
                                   const std::string& nonce) override {
        return cta_.redeem_registration_nonce(email, id, nonce);
    }

private:
    authority::CertificationAuthority& cta_;
};

enum class Role { instructor, student };

struct Config {
    password::Cost password_cost;
    std::uint64_t session_ttl_seconds = 3600;
};

/// Result of an operation that reports b in {0, 1}.
struct Outcome {
    int b = 0;
    std::string reason;
};

struct Session {
    std::string token;  // 32 hex chars
    std::string principal;
    Role role = Role::student;
    std::string subject;  // instructor ID or student roll
    std::uint64_t expiry = 0;
};

struct Retrieved {
    Bytes envelope;  // from the local store, unverified
    m2fe::CredentialHash hash;  // from the ledger
};

struct CourseCredential {
    std::string course;
    Bytes envelope;
    m2fe::CredentialHash hash;
};

class CredentialService final : public authority::StudentSink {
public:
    using Clock = std::function<std::uint64_t()>;

    CredentialService(Config config, lds::LocalStore& store, ledger::Ledger& chain, AuthorityLink& cta,
                      RandomSource& rng, std::optional<std::filesystem::path> state_file = std::nullopt,
                      Clock clock = {});

    Outcome register_instructor(const std::string& email, const std::string& password, const std::string& id,
                                const std::string& nonce);
    Outcome register_student(const std::string& email, const std::string& password, const std::string& roll);

    /// Both throw Error{auth_failed} uniformly on any mismatch.
    Session login_instructor(const std::string& email, const std::string& password, const std::string& nonce);
    Session login_student(const std::string& email, const std::string& password);

    /// Stores in the local store, then appends (c, H_c) to the ledger.
    /// Throws Error{auth_failed}, Error{hash_mismatch}, Error{not_found} (roll
    /// unknown), Error{bad_request} (not an envelope) or Error{persistence_failure}.
    void upload(const std::string& token, const std::string& roll, const std::string& course,
                const Bytes& envelope, const m2fe::CredentialHash& hash);

    /// Returns the local-store bytes and the ledger digest without checking
    /// one against the other. A missing local copy comes back empty.
    /// Throws Error{auth_failed}, Error{forbidden} or Error{not_found}.
    Retrieved retrieve(const std::string& token, const std::string& roll, const std::string& course) const;

    /// Latest record of every course for the caller's roll.
    std::vector<CourseCredential> transcript(const std::string& token, const std::string& roll) const;

    /// Re-authenticates the student, copies the ledger's c back to the local
    /// store and returns it. Throws Error{auth_failed} or Error{not_found};
    /// the session form throws Error{forbidden} for another student's roll.
    Bytes recover(const std::string& email, const std::string& password, const std::string& roll,
                  const std::string& course);
    Bytes recover(const std::string& token, const std::string& roll, const std::string& course);

    /// Receives (e, N, email, roll) from the CTA.
    void accept_student(const authority::StudentNotice& notice) override;

    std::optional<authority::StudentNotice> student_public_key(const std::string& roll) const;

private:
    struct Account {
        std::string email;
        Role role = Role::student;
        std::string password_digest;
        std::string subject;
        std::string nonce_digest;  // instructors: SHA-256 of the redeemed nonce
    };

    Session open_session(const Account& account);
    Session require(const std::string& token, Role role) const;
    const Account* authenticate(const std::string& email, const std::string& password) const;
    Bytes restore(const std::string& roll, const std::string& course);
    void save_locked() const;
    void load();

    Config config_;
    lds::LocalStore& store_;
    ledger::Ledger& chain_;
    AuthorityLink& cta_;
    RandomSource& rng_;
    std::optional<std::filesystem::path> state_file_;
    Clock clock_;

    mutable std::mutex mutex_;
    std::unordered_map<std::string, Account> accounts_;  // by email
    std::unordered_map<std::string, authority::StudentNotice> forwarded_;  // by roll
    std::unordered_map<std::string, Session> sessions_;
    std::unordered_map<std::string, std::string> roll_owner_;  // roll -> email of registered account
    std::unordered_map<std::string, std::string> instructor_ids_;  // ID -> email
};

std::string_view to_string(Role role);

}  // namespace credsec::cms
