#include "credsec/http_api.hpp"

#include <httplib.h>

#include <json.hpp>
#include <regex>
#include <thread>

#include "credsec/keyfile.hpp"

namespace credsec::http {

using nlohmann::json;

int status_for(Errc code) {
    switch (code) {
    case Errc::auth_failed: return 401;
    case Errc::forbidden: return 403;
    case Errc::not_found: return 404;
    case Errc::duplicate_instructor:
    case Errc::duplicate_student: return 409;
    case Errc::hash_mismatch: return 422;
    case Errc::persistence_failure: return 500;
    case Errc::unavailable: return 503;
    default: return 400;
    }
}

namespace {

std::string field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name) || !j.at(name).is_string()) {
        throw Error(Errc::bad_request, std::string("missing string field \"") + name + "\"");
    }
    return j.at(name).get<std::string>();
}

mpz_class decimal(const std::string& text, const char* name) {
    static const std::regex digits("[0-9]+");
    if (!std::regex_match(text, digits)) {
        throw Error(Errc::bad_request, std::string(name) + " must be a decimal integer");
    }
    return mpz_class(text, 10);
}

json outcome_json(const cms::Outcome& o) { return {{"b", o.b}, {"reason", o.reason}}; }

void fail(httplib::Response& res, Errc code, const std::string& reason) {
    res.status = status_for(code);
    res.set_content(json{{"b", 0}, {"error", std::string(to_string(code))}, {"reason", reason}}.dump(),
                    "application/json");
}

template <class F>
httplib::Server::Handler guarded(F fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            json out = fn(req);
            res.set_content(out.dump(), "application/json");
        } catch (const Error& e) {
            fail(res, e.code(), e.detail());
        } catch (const json::exception& e) {
            fail(res, Errc::bad_request, e.what());
        }
    };
}

json body_of(const httplib::Request& req) {
    json j = json::parse(req.body);
    if (!j.is_object()) {
        throw Error(Errc::bad_request, "request body must be a JSON object");
    }
    return j;
}

std::string bearer(const httplib::Request& req) {
    const std::string h = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) {
        throw Error(Errc::auth_failed, "missing bearer token");
    }
    return h.substr(prefix.size());
}

void require_link(const httplib::Request& req, const std::string& secret) {
    if (secret.empty() || !constant_time_equal(req.get_header_value(kLinkHeader), secret)) {
        throw Error(Errc::forbidden, "internal route");
    }
}

json credential_json(const std::string& roll, const std::string& course, const Bytes& envelope,
                     const m2fe::CredentialHash& hash) {
    return {{"roll", roll}, {"course", course}, {"envelope", base64_encode(envelope)}, {"hash", hash.hex()}};
}

// Client plumbing.

json call(const std::string& endpoint, const std::string& method, const std::string& path, const json* body,
          const httplib::Headers& headers = {}) {
    httplib::Client client(endpoint);
    client.set_connection_timeout(5);
    client.set_read_timeout(600);
    client.set_write_timeout(600);
    httplib::Result res = method == "GET"
                              ? client.Get(path, headers)
                              : client.Post(path, headers, body ? body->dump() : std::string("{}"), "application/json");
    if (!res) {
        throw Error(Errc::unavailable, endpoint + path + ": " + httplib::to_string(res.error()));
    }
    json out = json::parse(res->body, nullptr, false);
    if (res->status >= 300) {
        Errc code = Errc::unavailable;
        std::string reason = "HTTP " + std::to_string(res->status);
        if (out.is_object() && out.contains("error")) {
            code = errc_from_string(out.value("error", "")).value_or(Errc::unavailable);
            reason = out.value("reason", reason);
        }
        throw Error(code, reason);
    }
    if (out.is_discarded()) {
        throw Error(Errc::unavailable, endpoint + path + ": response is not JSON");
    }
    return out;
}

httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

m2fe::CredentialHash hash_field(const json& j) { return {digest_from_hex(field(j, "hash"))}; }

}  // namespace

class Service::Impl {
public:
    httplib::Server server;
    std::thread thread;
    std::string host;
    std::uint16_t port = 0;
};

Service::Service(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Service::~Service() { stop(); }

std::uint16_t Service::start(const std::string& host, std::uint16_t port) {
    int bound = 0;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else {
        bound = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (bound <= 0) {
        throw Error(Errc::unavailable, "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->host = host;
    impl_->port = static_cast<std::uint16_t>(bound);
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void Service::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

void Service::wait() {
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

std::string Service::endpoint() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

std::unique_ptr<Service> make_cta_service(authority::CertificationAuthority& cta, std::string link_secret) {
    auto impl = std::make_unique<Service::Impl>();
    auto& s = impl->server;

    s.Get("/health", guarded([](const httplib::Request&) { return json{{"ok", true}, {"role", "cta"}}; }));

    s.Post("/cta/ins/register", guarded([&cta](const httplib::Request& req) {
               const json j = body_of(req);
               const auto nonce = cta.register_instructor(field(j, "email"), field(j, "id"));
               return json{{"nonce", nonce.value}};
           }));

    s.Post("/cta/std/register", guarded([&cta](const httplib::Request& req) {
               const json j = body_of(req);
               return to_json(cta.register_student(field(j, "email"), field(j, "roll")));
           }));

    s.Post("/cta/ins/keys", guarded([&cta](const httplib::Request& req) {
               const json j = body_of(req);
               return to_json(cta.instructor_keys(field(j, "id"), field(j, "nonce"), field(j, "roll")));
           }));

    s.Post("/cta/internal/redeem", guarded([&cta, link_secret](const httplib::Request& req) {
               require_link(req, link_secret);
               const json j = body_of(req);
               const bool ok = cta.redeem_registration_nonce(field(j, "email"), field(j, "id"), field(j, "nonce"));
               return json{{"b", ok ? 1 : 0}};
           }));

    return std::make_unique<Service>(std::move(impl));
}

std::unique_ptr<Service> make_cms_service(cms::CredentialService& svc, std::string link_secret) {
    auto impl = std::make_unique<Service::Impl>();
    auto& s = impl->server;

    s.Get("/health", guarded([](const httplib::Request&) { return json{{"ok", true}, {"role", "cms"}}; }));

    s.Post("/ins/register", guarded([&svc](const httplib::Request& req) {
               const json j = body_of(req);
               return outcome_json(
                   svc.register_instructor(field(j, "email"), field(j, "password"), field(j, "id"), field(j, "nonce")));
           }));

    s.Post("/std/register", guarded([&svc](const httplib::Request& req) {
               const json j = body_of(req);
               return outcome_json(svc.register_student(field(j, "email"), field(j, "password"), field(j, "roll")));
           }));

    s.Post("/ins/login", guarded([&svc](const httplib::Request& req) {
               const json j = body_of(req);
               const auto session = svc.login_instructor(field(j, "email"), field(j, "password"), field(j, "nonce"));
               return json{{"b", 1}, {"token", session.token}, {"expiry", session.expiry}};
           }));

    s.Post("/std/login", guarded([&svc](const httplib::Request& req) {
               const json j = body_of(req);
               const auto session = svc.login_student(field(j, "email"), field(j, "password"));
               return json{{"b", 1}, {"token", session.token}, {"expiry", session.expiry}};
           }));

    s.Post("/credential/upload", guarded([&svc](const httplib::Request& req) {
               const std::string token = bearer(req);
               const json j = body_of(req);
               svc.upload(token, field(j, "roll"), field(j, "course"), base64_decode(field(j, "envelope")),
                          hash_field(j));
               return json{{"b", 1}};
           }));

    s.Get(R"(/credential/([^/]+)/([^/]+))", guarded([&svc](const httplib::Request& req) {
              const std::string roll = req.matches[1];
              const std::string course = req.matches[2];
              const auto got = svc.retrieve(bearer(req), roll, course);
              return credential_json(roll, course, got.envelope, got.hash);
          }));

    s.Get(R"(/credential/([^/]+))", guarded([&svc](const httplib::Request& req) {
              const std::string roll = req.matches[1];
              json list = json::array();
              for (const auto& c : svc.transcript(bearer(req), roll)) {
                  list.push_back(credential_json(roll, c.course, c.envelope, c.hash));
              }
              return json{{"roll", roll}, {"credentials", list}};
          }));

    s.Post("/credential/recover", guarded([&svc](const httplib::Request& req) {
               const json j = body_of(req);
               const std::string roll = field(j, "roll");
               const std::string course = field(j, "course");
               const Bytes restored = req.has_header("Authorization")
                                          ? svc.recover(bearer(req), roll, course)
                                          : svc.recover(field(j, "email"), field(j, "password"), roll, course);
               json out = credential_json(roll, course, restored, m2fe::CredentialHash::of(restored));
               out["b"] = 1;
               return out;
           }));

    s.Post("/internal/student", guarded([&svc, link_secret](const httplib::Request& req) {
               require_link(req, link_secret);
               const json j = body_of(req);
               svc.accept_student(authority::StudentNotice{field(j, "email"), field(j, "roll"),
                                                           decimal(field(j, "e"), "e"), decimal(field(j, "N"), "N")});
               return json{{"b", 1}};
           }));

    return std::make_unique<Service>(std::move(impl));
}

HttpAuthorityLink::HttpAuthorityLink(std::string cta_endpoint, std::string link_secret)
    : endpoint_(std::move(cta_endpoint)), secret_(std::move(link_secret)) {}

bool HttpAuthorityLink::redeem_registration_nonce(const std::string& email, const std::string& id,
                                                  const std::string& nonce) {
    const json body{{"email", email}, {"id", id}, {"nonce", nonce}};
    return call(endpoint_, "POST", "/cta/internal/redeem", &body, {{kLinkHeader, secret_}}).value("b", 0) == 1;
}

HttpStudentSink::HttpStudentSink(std::string cms_endpoint, std::string link_secret)
    : endpoint_(std::move(cms_endpoint)), secret_(std::move(link_secret)) {}

void HttpStudentSink::accept_student(const authority::StudentNotice& notice) {
    const json body{{"email", notice.email}, {"roll", notice.roll}, {"e", notice.e.get_str()}, {"N", notice.n.get_str()}};
    call(endpoint_, "POST", "/internal/student", &body, {{kLinkHeader, secret_}});
}

std::string CtaClient::register_instructor(const std::string& email, const std::string& id) const {
    const json body{{"email", email}, {"id", id}};
    return field(call(endpoint_, "POST", "/cta/ins/register", &body), "nonce");
}

KeyBundle CtaClient::register_student(const std::string& email, const std::string& roll) const {
    const json body{{"email", email}, {"roll", roll}};
    return key_bundle_from_json(call(endpoint_, "POST", "/cta/std/register", &body));
}

KeyBundle CtaClient::instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) const {
    const json body{{"id", id}, {"nonce", nonce}, {"roll", roll}};
    return key_bundle_from_json(call(endpoint_, "POST", "/cta/ins/keys", &body));
}

cms::Outcome CmsClient::register_instructor(const std::string& email, const std::string& password,
                                            const std::string& id, const std::string& nonce) const {
    const json body{{"email", email}, {"password", password}, {"id", id}, {"nonce", nonce}};
    const json out = call(endpoint_, "POST", "/ins/register", &body);
    return {out.value("b", 0), out.value("reason", "")};
}

cms::Outcome CmsClient::register_student(const std::string& email, const std::string& password,
                                         const std::string& roll) const {
    const json body{{"email", email}, {"password", password}, {"roll", roll}};
    const json out = call(endpoint_, "POST", "/std/register", &body);
    return {out.value("b", 0), out.value("reason", "")};
}

std::string CmsClient::login_instructor(const std::string& email, const std::string& password,
                                        const std::string& nonce) const {
    const json body{{"email", email}, {"password", password}, {"nonce", nonce}};
    return field(call(endpoint_, "POST", "/ins/login", &body), "token");
}

std::string CmsClient::login_student(const std::string& email, const std::string& password) const {
    const json body{{"email", email}, {"password", password}};
    return field(call(endpoint_, "POST", "/std/login", &body), "token");
}

void CmsClient::upload(const std::string& token, const std::string& roll, const std::string& course,
                       const Bytes& envelope, const m2fe::CredentialHash& hash) const {
    const json body{{"roll", roll}, {"course", course}, {"envelope", base64_encode(envelope)}, {"hash", hash.hex()}};
    call(endpoint_, "POST", "/credential/upload", &body, auth(token));
}

cms::Retrieved CmsClient::retrieve(const std::string& token, const std::string& roll, const std::string& course) const {
    const json out = call(endpoint_, "GET", "/credential/" + roll + "/" + course, nullptr, auth(token));
    return {base64_decode(field(out, "envelope")), hash_field(out)};
}

std::vector<cms::CourseCredential> CmsClient::transcript(const std::string& token, const std::string& roll) const {
    const json out = call(endpoint_, "GET", "/credential/" + roll, nullptr, auth(token));
    std::vector<cms::CourseCredential> list;
    for (const auto& c : out.at("credentials")) {
        list.push_back({field(c, "course"), base64_decode(field(c, "envelope")), hash_field(c)});
    }
    return list;
}

Bytes CmsClient::recover(const std::string& email, const std::string& password, const std::string& roll,
                         const std::string& course) const {
    const json body{{"email", email}, {"password", password}, {"roll", roll}, {"course", course}};
    return base64_decode(field(call(endpoint_, "POST", "/credential/recover", &body), "envelope"));
}

Bytes CmsClient::recover(const std::string& token, const std::string& roll, const std::string& course) const {
    const json body{{"roll", roll}, {"course", course}};
    return base64_decode(field(call(endpoint_, "POST", "/credential/recover", &body, auth(token)), "envelope"));
}

}  // namespace credsec::http
