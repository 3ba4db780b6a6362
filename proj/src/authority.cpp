#include "credsec/authority.hpp"

#include <mutex>

#include "credsec/digest.hpp"
#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

namespace credsec::authority {

CertificationAuthority::CertificationAuthority(Config config, RandomSource& rng, StudentSink* sink,
                                               std::optional<std::filesystem::path> state_file)
    : config_(config), rng_(rng), sink_(sink), state_file_(std::move(state_file)) {
    if (state_file_ && std::filesystem::exists(*state_file_)) {
        load();
    }
}

SystemParams CertificationAuthority::setup() {
    SystemParams out;
    out.rsa = rsa::setup(config_.lambda, rng_);
    out.dna = dna::setup(config_.dna_bits, rng_);
    return out;
}

Nonce CertificationAuthority::register_instructor(const std::string& email, const std::string& id) {
    if (email.empty() || id.empty()) {
        throw Error(Errc::bad_request, "instructor email and ID are required");
    }
    std::unique_lock lock(mutex_);
    if (instructors_.contains(id)) {
        throw Error(Errc::duplicate_instructor, "instructor " + id + " is already registered");
    }
    for (const auto& [_, ins] : instructors_) {
        if (ins.email == email) {
            throw Error(Errc::duplicate_instructor, "email is already registered");
        }
    }
    Instructor ins;
    ins.email = email;
    ins.nonce.value = rng_.hex_token(16);
    ins.nonce.bound_to = id;
    instructors_.emplace(id, ins);
    save_locked();
    return ins.nonce;
}

KeyBundle CertificationAuthority::register_student(const std::string& email, const std::string& roll) {
    if (email.empty() || roll.empty()) {
        throw Error(Errc::bad_request, "student email and roll are required");
    }
    {
        std::shared_lock lock(mutex_);
        if (students_.contains(roll)) {
            throw Error(Errc::duplicate_student, "roll " + roll + " is already registered");
        }
        for (const auto& [_, st] : students_) {
            if (st.email == email) {
                throw Error(Errc::duplicate_student, "email is already registered");
            }
        }
    }

    // Key generation runs outside the lock; it dominates registration time.
    const SystemParams params = setup();
    const rsa::Keys keys = rsa::keygen(params.rsa, rng_, config_.exponent_mode);
    Student st;
    st.email = email;
    st.keys.roll = roll;
    st.keys.n = params.rsa.n;
    st.keys.e = keys.e;
    st.keys.d = keys.d;
    st.keys.p = params.rsa.p;
    st.keys.q = params.rsa.q;
    st.keys.dna.params = params.dna;
    st.keys.dna.key = dna::keygen(params.dna);
    st.keys.dna.rule = static_cast<int>(rng_.uniform(0, dna::kRuleCount - 1));

    {
        std::unique_lock lock(mutex_);
        if (students_.contains(roll)) {
            throw Error(Errc::duplicate_student, "roll " + roll + " is already registered");
        }
        students_.emplace(roll, st);
        save_locked();
    }
    if (sink_ != nullptr) {
        try {
            sink_->accept_student(StudentNotice{email, roll, st.keys.e, st.keys.n});
        } catch (...) {
            // The CMS never heard of this roll; undo so the student can retry.
            std::unique_lock lock(mutex_);
            students_.erase(roll);
            save_locked();
            throw;
        }
    }
    return st.keys.student_view();
}

bool CertificationAuthority::redeem_registration_nonce(const std::string& email, const std::string& id,
                                                       const std::string& nonce) {
    std::unique_lock lock(mutex_);
    const auto it = instructors_.find(id);
    if (it == instructors_.end() || it->second.email != email || it->second.nonce.used) {
        return false;
    }
    if (!constant_time_equal(nonce, it->second.nonce.value)) {
        return false;
    }
    it->second.nonce.used = true;
    save_locked();
    return true;
}

KeyBundle CertificationAuthority::instructor_keys(const std::string& id, const std::string& nonce,
                                                  const std::string& roll) const {
    std::shared_lock lock(mutex_);
    const auto ins = instructors_.find(id);
    if (ins == instructors_.end() || !constant_time_equal(nonce, ins->second.nonce.value)) {
        throw Error(Errc::auth_failed, "instructor authentication failed");
    }
    const auto st = students_.find(roll);
    if (st == students_.end()) {
        throw Error(Errc::not_found, "no student with roll " + roll);
    }
    return st->second.keys.instructor_view();
}

std::optional<Nonce> CertificationAuthority::nonce_for(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = instructors_.find(id);
    if (it == instructors_.end()) {
        return std::nullopt;
    }
    return it->second.nonce;
}

void CertificationAuthority::save_locked() const {
    if (!state_file_) {
        return;
    }
    nlohmann::json j;
    j["instructors"] = nlohmann::json::array();
    for (const auto& [id, ins] : instructors_) {
        j["instructors"].push_back(
            {{"id", id}, {"email", ins.email}, {"nonce", ins.nonce.value}, {"used", ins.nonce.used}});
    }
    j["students"] = nlohmann::json::array();
    for (const auto& [roll, st] : students_) {
        j["students"].push_back({{"email", st.email}, {"keys", to_json(st.keys)}});
    }
    fsio::atomic_write(*state_file_, j.dump(2) + "\n");
}

void CertificationAuthority::load() {
    const Bytes raw = fsio::read_file(*state_file_);
    const auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (j.is_discarded()) {
        throw Error(Errc::persistence_failure, "authority state file is not valid JSON");
    }
    for (const auto& ins : j.value("instructors", nlohmann::json::array())) {
        Instructor rec;
        rec.email = ins.at("email").get<std::string>();
        rec.nonce.bound_to = ins.at("id").get<std::string>();
        rec.nonce.value = ins.at("nonce").get<std::string>();
        rec.nonce.used = ins.value("used", false);
        instructors_.emplace(rec.nonce.bound_to, rec);
    }
    for (const auto& st : j.value("students", nlohmann::json::array())) {
        Student rec;
        rec.email = st.at("email").get<std::string>();
        rec.keys = key_bundle_from_json(st.at("keys"));
        students_.emplace(rec.keys.roll, rec);
    }
}

}  // namespace credsec::authority
