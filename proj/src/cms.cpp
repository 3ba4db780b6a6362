#include "credsec/cms.hpp"

#include <chrono>

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

namespace credsec::cms {
namespace {

std::uint64_t system_clock_seconds() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
}

std::string nonce_digest(const std::string& nonce) {
    return to_hex(sha256(nonce));
}

[[noreturn]] void auth_failed() {
    throw Error(Errc::auth_failed, "authentication failed");
}

}  // namespace

std::string_view to_string(Role role) {
    return role == Role::instructor ? "instructor" : "student";
}

CredentialService::CredentialService(Config config, lds::LocalStore& store, ledger::Ledger& chain,
                                     AuthorityLink& cta, RandomSource& rng,
                                     std::optional<std::filesystem::path> state_file, Clock clock)
    : config_(config),
      store_(store),
      chain_(chain),
      cta_(cta),
      rng_(rng),
      state_file_(std::move(state_file)),
      clock_(clock ? std::move(clock) : Clock(system_clock_seconds)) {
    if (state_file_ && std::filesystem::exists(*state_file_)) {
        load();
    }
}

Outcome CredentialService::register_instructor(const std::string& email, const std::string& password,
                                               const std::string& id, const std::string& nonce) {
    if (email.empty() || password.empty() || id.empty()) {
        return {0, "email, password and ID are required"};
    }
    {
        std::lock_guard lock(mutex_);
        if (accounts_.contains(email)) {
            return {0, "account already exists"};
        }
        if (instructor_ids_.contains(id)) {
            return {0, "instructor ID already registered"};
        }
    }
    if (!cta_.redeem_registration_nonce(email, id, nonce)) {
        return {0, "nonce rejected by the certification authority"};
    }
    Account acc;
    acc.email = email;
    acc.role = Role::instructor;
    acc.password_digest = password::hash(password, rng_, config_.password_cost);
    acc.subject = id;
    acc.nonce_digest = nonce_digest(nonce);

    std::lock_guard lock(mutex_);
    if (accounts_.contains(email) || instructor_ids_.contains(id)) {
        return {0, "account already exists"};
    }
    accounts_.emplace(email, acc);
    instructor_ids_.emplace(id, email);
    save_locked();
    return {1, "registered"};
}

Outcome CredentialService::register_student(const std::string& email, const std::string& password,
                                            const std::string& roll) {
    if (email.empty() || password.empty() || roll.empty()) {
        return {0, "email, password and roll are required"};
    }
    {
        std::lock_guard lock(mutex_);
        const auto fwd = forwarded_.find(roll);
        if (fwd == forwarded_.end() || fwd->second.email != email) {
            return {0, "no matching registration from the certification authority"};
        }
        if (accounts_.contains(email) || roll_owner_.contains(roll)) {
            return {0, "account already exists"};
        }
    }
    Account acc;
    acc.email = email;
    acc.role = Role::student;
    acc.password_digest = password::hash(password, rng_, config_.password_cost);
    acc.subject = roll;

    std::lock_guard lock(mutex_);
    if (accounts_.contains(email) || roll_owner_.contains(roll)) {
        return {0, "account already exists"};
    }
    accounts_.emplace(email, acc);
    roll_owner_.emplace(roll, email);
    save_locked();
    return {1, "registered"};
}

const CredentialService::Account* CredentialService::authenticate(const std::string& email,
                                                                  const std::string& password) const {
    std::optional<Account> acc;
    {
        std::lock_guard lock(mutex_);
        if (const auto it = accounts_.find(email); it != accounts_.end()) {
            acc = it->second;
        }
    }
    if (!acc) {
        // Spend the same hashing work for unknown accounts.
        static const std::string dummy = [] {
            SeededRandom r(0);
            return password::hash("-", r);
        }();
        password::verify(password, dummy);
        return nullptr;
    }
    if (!password::verify(password, acc->password_digest)) {
        return nullptr;
    }
    std::lock_guard lock(mutex_);
    const auto it = accounts_.find(email);
    return it == accounts_.end() ? nullptr : &it->second;
}

Session CredentialService::open_session(const Account& account) {
    Session s;
    s.token = rng_.hex_token(16);
    s.principal = account.email;
    s.role = account.role;
    s.subject = account.subject;
    s.expiry = clock_() + config_.session_ttl_seconds;
    std::lock_guard lock(mutex_);
    sessions_[s.token] = s;
    return s;
}

Session CredentialService::login_instructor(const std::string& email, const std::string& password,
                                            const std::string& nonce) {
    const Account* acc = authenticate(email, password);
    if (acc == nullptr || acc->role != Role::instructor ||
        !constant_time_equal(nonce_digest(nonce), acc->nonce_digest)) {
        auth_failed();
    }
    return open_session(*acc);
}

Session CredentialService::login_student(const std::string& email, const std::string& password) {
    const Account* acc = authenticate(email, password);
    if (acc == nullptr || acc->role != Role::student) {
        auth_failed();
    }
    return open_session(*acc);
}

Session CredentialService::require(const std::string& token, Role role) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(token);
    if (it == sessions_.end() || it->second.expiry <= clock_() || it->second.role != role) {
        auth_failed();
    }
    return it->second;
}

void CredentialService::upload(const std::string& token, const std::string& roll, const std::string& course,
                               const Bytes& envelope, const m2fe::CredentialHash& hash) {
    const Session s = require(token, Role::instructor);
    if (m2fe::CredentialHash::of(envelope) != hash) {
        throw Error(Errc::hash_mismatch, "H_c does not match the uploaded envelope");
    }
    try {
        m2fe::parse(envelope);
    } catch (const Error& e) {
        throw Error(Errc::bad_request, "upload is not a credential envelope: " + e.detail());
    }
    {
        std::lock_guard lock(mutex_);
        if (!forwarded_.contains(roll)) {
            throw Error(Errc::not_found, "unknown roll " + roll);
        }
    }
    store_.put(roll, course, envelope);
    chain_.append({ledger::Record::make(roll, course, envelope, s.subject)});
}

Retrieved CredentialService::retrieve(const std::string& token, const std::string& roll,
                                      const std::string& course) const {
    const Session s = require(token, Role::student);
    if (s.subject != roll) {
        throw Error(Errc::forbidden, "students may only fetch their own credentials");
    }
    const ledger::Record rec = chain_.latest(roll, course);
    Retrieved out;
    out.hash.value = rec.credential_hash;
    try {
        out.envelope = store_.get(roll, course);
    } catch (const Error& e) {
        if (e.code() != Errc::not_found) throw;
    }
    return out;
}

std::vector<CourseCredential> CredentialService::transcript(const std::string& token, const std::string& roll) const {
    const Session s = require(token, Role::student);
    if (s.subject != roll) {
        throw Error(Errc::forbidden, "students may only fetch their own credentials");
    }
    std::vector<CourseCredential> out;
    for (const auto& rec : chain_.latest_for_roll(roll)) {
        CourseCredential c;
        c.course = rec.course;
        c.hash.value = rec.credential_hash;
        try {
            c.envelope = store_.get(roll, rec.course);
        } catch (const Error& e) {
            if (e.code() != Errc::not_found) throw;
        }
        out.push_back(std::move(c));
    }
    return out;
}

Bytes CredentialService::restore(const std::string& roll, const std::string& course) {
    const ledger::Record rec = chain_.latest(roll, course);
    store_.put(roll, course, rec.envelope);
    return rec.envelope;
}

Bytes CredentialService::recover(const std::string& email, const std::string& password, const std::string& roll,
                                 const std::string& course) {
    const Account* acc = authenticate(email, password);
    if (acc == nullptr || acc->role != Role::student || acc->subject != roll) {
        auth_failed();
    }
    return restore(roll, course);
}

Bytes CredentialService::recover(const std::string& token, const std::string& roll, const std::string& course) {
    const Session s = require(token, Role::student);
    if (s.subject != roll) {
        throw Error(Errc::forbidden, "students may only recover their own credentials");
    }
    return restore(roll, course);
}

void CredentialService::accept_student(const authority::StudentNotice& notice) {
    std::lock_guard lock(mutex_);
    forwarded_[notice.roll] = notice;
    save_locked();
}

std::optional<authority::StudentNotice> CredentialService::student_public_key(const std::string& roll) const {
    std::lock_guard lock(mutex_);
    const auto it = forwarded_.find(roll);
    if (it == forwarded_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void CredentialService::save_locked() const {
    if (!state_file_) {
        return;
    }
    nlohmann::json j;
    j["accounts"] = nlohmann::json::array();
    for (const auto& [email, acc] : accounts_) {
        j["accounts"].push_back({{"email", email},
                                 {"role", to_string(acc.role)},
                                 {"password_digest", acc.password_digest},
                                 {"subject", acc.subject},
                                 {"nonce_digest", acc.nonce_digest}});
    }
    j["students"] = nlohmann::json::array();
    for (const auto& [roll, n] : forwarded_) {
        j["students"].push_back({{"email", n.email}, {"roll", roll}, {"e", n.e.get_str(10)}, {"N", n.n.get_str(10)}});
    }
    fsio::atomic_write(*state_file_, j.dump(2) + "\n");
}

void CredentialService::load() {
    const Bytes raw = fsio::read_file(*state_file_);
    const auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (j.is_discarded()) {
        throw Error(Errc::persistence_failure, "CMS state file is not valid JSON");
    }
    for (const auto& a : j.value("accounts", nlohmann::json::array())) {
        Account acc;
        acc.email = a.at("email").get<std::string>();
        acc.role = a.at("role").get<std::string>() == "instructor" ? Role::instructor : Role::student;
        acc.password_digest = a.at("password_digest").get<std::string>();
        acc.subject = a.at("subject").get<std::string>();
        acc.nonce_digest = a.value("nonce_digest", "");
        if (acc.role == Role::instructor) {
            instructor_ids_[acc.subject] = acc.email;
        } else {
            roll_owner_[acc.subject] = acc.email;
        }
        accounts_[acc.email] = acc;
    }
    for (const auto& s : j.value("students", nlohmann::json::array())) {
        authority::StudentNotice n;
        n.email = s.at("email").get<std::string>();
        n.roll = s.at("roll").get<std::string>();
        n.e = mpz_class(s.at("e").get<std::string>(), 10);
        n.n = mpz_class(s.at("N").get<std::string>(), 10);
        forwarded_[n.roll] = n;
    }
}

}  // namespace credsec::cms
