#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "credsec/authority.hpp"
#include "credsec/cms.hpp"
#include "credsec/error.hpp"

// JSON over HTTP for the CTA and CMS.
//
// CMS routes:
//   POST /ins/register            {email, password, id, nonce}         -> {b, reason}
//   POST /std/register            {email, password, roll}              -> {b, reason}
//   POST /ins/login               {email, password, nonce}             -> {b, token, expiry}
//   POST /std/login               {email, password}                    -> {b, token, expiry}
//   POST /credential/upload       Bearer; {roll, course, envelope, hash} -> {b}
//   GET  /credential/{roll}/{course}  Bearer                           -> {roll, course, envelope, hash}
//   GET  /credential/{roll}       Bearer                               -> {roll, credentials: [...]}
//   POST /credential/recover      Bearer or {email, password}; {roll, course} -> {b, envelope, hash}
//   POST /internal/student        link secret; {email, roll, e, N}
//
// CTA routes:
//   POST /cta/ins/register        {email, id}            -> {nonce}
//   POST /cta/std/register        {email, roll}          -> student key bundle
//   POST /cta/ins/keys            {id, nonce, roll}      -> instructor key bundle
//   POST /cta/internal/redeem     link secret; {email, id, nonce} -> {b}
//
// Envelopes travel base64-encoded, digests as lowercase hex, big integers as
// decimal strings. Failures carry {b: 0, error: "<ErrorName>", reason} with
// the status from status_for().
namespace credsec::http {

inline constexpr const char* kLinkHeader = "X-Credsec-Link";

int status_for(Errc code);

/// A running server. Handlers execute on the server's worker threads.
class Service {
public:
    class Impl;

    explicit Service(std::unique_ptr<Impl> impl);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and starts serving on a background thread. Port 0 picks a free
    /// port. Returns the bound port. Throws Error{unavailable}.
    std::uint16_t start(const std::string& host, std::uint16_t port);
    void stop();
    /// Blocks until stop() is called (from a handler or another thread).
    void wait();

    std::string endpoint() const;

private:
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Service> make_cta_service(authority::CertificationAuthority& cta, std::string link_secret);
std::unique_ptr<Service> make_cms_service(cms::CredentialService& cms, std::string link_secret);

/// CMS side of the internal link: nonce redemption at the CTA.
class HttpAuthorityLink final : public cms::AuthorityLink {
public:
    HttpAuthorityLink(std::string cta_endpoint, std::string link_secret);
    bool redeem_registration_nonce(const std::string& email, const std::string& id,
                                   const std::string& nonce) override;

private:
    std::string endpoint_;
    std::string secret_;
};

/// CTA side of the internal link: forwards (e, N, email, roll) to the CMS.
class HttpStudentSink final : public authority::StudentSink {
public:
    HttpStudentSink(std::string cms_endpoint, std::string link_secret);
    void accept_student(const authority::StudentNotice& notice) override;

private:
    std::string endpoint_;
    std::string secret_;
};

// Clients. Server-side failures are rethrown as Error with the same code;
// connection failures as Error{unavailable}.

class CtaClient {
public:
    explicit CtaClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}

    std::string register_instructor(const std::string& email, const std::string& id) const;
    KeyBundle register_student(const std::string& email, const std::string& roll) const;
    KeyBundle instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) const;

private:
    std::string endpoint_;
};

class CmsClient {
public:
    explicit CmsClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}

    cms::Outcome register_instructor(const std::string& email, const std::string& password, const std::string& id,
                                     const std::string& nonce) const;
    cms::Outcome register_student(const std::string& email, const std::string& password,
                                  const std::string& roll) const;
    /// Returns the session token.
    std::string login_instructor(const std::string& email, const std::string& password,
                                 const std::string& nonce) const;
    std::string login_student(const std::string& email, const std::string& password) const;

    void upload(const std::string& token, const std::string& roll, const std::string& course, const Bytes& envelope,
                const m2fe::CredentialHash& hash) const;
    cms::Retrieved retrieve(const std::string& token, const std::string& roll, const std::string& course) const;
    std::vector<cms::CourseCredential> transcript(const std::string& token, const std::string& roll) const;
    Bytes recover(const std::string& email, const std::string& password, const std::string& roll,
                  const std::string& course) const;
    Bytes recover(const std::string& token, const std::string& roll, const std::string& course) const;

private:
    std::string endpoint_;
};

}  // namespace credsec::http
