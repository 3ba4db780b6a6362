#include <doctest.h>

#include <filesystem>
#include <random>

#include "credsec/error.hpp"
#include "credsec/stack.hpp"

using namespace credsec;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    fs::path dir;
    SeededRandom rng{42};
    std::unique_ptr<LocalStack> stack;
    std::uint64_t now = 1'700'000'000;

    Fixture() {
        dir = fs::temp_directory_path() / ("credsec-cms-" + std::to_string(std::random_device{}()));
        fs::remove_all(dir);
        open();
    }
    ~Fixture() { fs::remove_all(dir); }

    void open() {
        authority::Config a;
        a.lambda = 256;
        cms::Config c;
        c.password_cost = {1u << 10, 8, 1};
        stack.reset();
        stack = std::make_unique<LocalStack>(dir, a, c, rng);
    }
};

Errc failure(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::bad_request;
}

struct Enrolled {
    std::string ins_nonce;
    KeyBundle keys;
};

Enrolled enroll(LocalStack& s) {
    Enrolled out;
    out.ins_nonce = s.cta.register_instructor("prof@uni.edu", "INS-1").value;
    REQUIRE(s.cms.register_instructor("prof@uni.edu", "pw-prof", "INS-1", out.ins_nonce).b == 1);
    out.keys = s.cta.register_student("alice@uni.edu", "R1");
    REQUIRE(s.cms.register_student("alice@uni.edu", "pw-alice", "R1").b == 1);
    return out;
}

m2fe::Sealed seal(const KeyBundle& keys, const std::string& text) {
    return m2fe::encrypt(text, keys.e, keys.n, keys.dna, {.chunk_digits = rsa::decimal_width(keys.n) - 1});
}

}  // namespace

TEST_CASE("instructor registration gate") {
    Fixture f;
    auto& s = *f.stack;
    const auto nonce = s.cta.register_instructor("prof@uni.edu", "INS-1").value;
    CHECK(s.cms.register_instructor("prof@uni.edu", "pw", "INS-1", "deadbeef").b == 0);
    const auto ok = s.cms.register_instructor("prof@uni.edu", "pw", "INS-1", nonce);
    CHECK(ok.b == 1);
    const auto dup = s.cms.register_instructor("prof@uni.edu", "pw", "INS-1", nonce);
    CHECK(dup.b == 0);
    CHECK_FALSE(dup.reason.empty());
    CHECK(s.cms.register_instructor("unknown@uni.edu", "pw", "INS-9", nonce).b == 0);
}

TEST_CASE("student registration needs the CTA forward") {
    Fixture f;
    auto& s = *f.stack;
    CHECK(s.cms.register_student("bob@uni.edu", "pw", "R2").b == 0);
    s.cta.register_student("bob@uni.edu", "R2");
    CHECK(s.cms.register_student("eve@uni.edu", "pw", "R2").b == 0);
    CHECK(s.cms.register_student("bob@uni.edu", "pw", "R2").b == 1);
    CHECK(s.cms.register_student("bob@uni.edu", "pw", "R2").b == 0);
    const auto pk = s.cms.student_public_key("R2");
    REQUIRE(pk.has_value());
    CHECK(pk->email == "bob@uni.edu");
}

TEST_CASE("login gates") {
    Fixture f;
    auto& s = *f.stack;
    const auto e = enroll(s);
    const auto ins = s.cms.login_instructor("prof@uni.edu", "pw-prof", e.ins_nonce);
    CHECK(ins.token.size() == 32);
    CHECK(ins.role == cms::Role::instructor);
    CHECK(failure([&] { s.cms.login_instructor("prof@uni.edu", "pw-prof", "00"); }) == Errc::auth_failed);
    CHECK(failure([&] { s.cms.login_instructor("prof@uni.edu", "wrong", e.ins_nonce); }) == Errc::auth_failed);
    CHECK(failure([&] { s.cms.login_instructor("alice@uni.edu", "pw-alice", ""); }) == Errc::auth_failed);

    const auto st = s.cms.login_student("alice@uni.edu", "pw-alice");
    CHECK(st.subject == "R1");
    CHECK(failure([&] { s.cms.login_student("alice@uni.edu", "pw-bob"); }) == Errc::auth_failed);
    CHECK(failure([&] { s.cms.login_student("nobody@uni.edu", "pw"); }) == Errc::auth_failed);
    CHECK(failure([&] { s.cms.login_student("prof@uni.edu", "pw-prof"); }) == Errc::auth_failed);
}

TEST_CASE("upload, retrieve, tamper, recover") {
    Fixture f;
    auto& s = *f.stack;
    const auto e = enroll(s);
    const auto ins = s.cms.login_instructor("prof@uni.edu", "pw-prof", e.ins_nonce).token;
    const auto st = s.cms.login_student("alice@uni.edu", "pw-alice").token;
    const auto sealed = seal(e.keys, "CS101: A");

    CHECK(failure([&] { s.cms.upload(st, "R1", "CS101", sealed.bytes, sealed.hash); }) == Errc::auth_failed);
    auto wrong = sealed.hash;
    wrong.value[0] ^= 1;
    CHECK(failure([&] { s.cms.upload(ins, "R1", "CS101", sealed.bytes, wrong); }) == Errc::hash_mismatch);
    CHECK(failure([&] { s.cms.upload(ins, "R7", "CS101", sealed.bytes, sealed.hash); }) == Errc::not_found);
    const Bytes junk = {1, 2, 3};
    CHECK(failure([&] { s.cms.upload(ins, "R1", "CS101", junk, m2fe::CredentialHash::of(junk)); }) ==
          Errc::bad_request);

    s.cms.upload(ins, "R1", "CS101", sealed.bytes, sealed.hash);
    CHECK(s.store.contains("R1", "CS101"));
    CHECK(s.chain.size() == 1);

    auto got = s.cms.retrieve(st, "R1", "CS101");
    CHECK(got.envelope == sealed.bytes);
    CHECK(m2fe::credential_verify(m2fe::CredentialHash::of(got.envelope), got.hash) == 1);
    CHECK(failure([&] { s.cms.retrieve(st, "R1", "MA201"); }) == Errc::not_found);
    CHECK(failure([&] { s.cms.retrieve(ins, "R1", "CS101"); }) == Errc::auth_failed);

    Bytes forged = sealed.bytes;
    forged[30] ^= 0x40;
    s.store.overwrite_raw("R1", "CS101", forged);
    got = s.cms.retrieve(st, "R1", "CS101");
    CHECK(got.envelope == forged);
    CHECK(got.hash == sealed.hash);
    CHECK(m2fe::credential_verify(m2fe::CredentialHash::of(got.envelope), got.hash) == 0);

    CHECK(failure([&] { s.cms.recover("alice@uni.edu", "bad", "R1", "CS101"); }) == Errc::auth_failed);
    const Bytes restored = s.cms.recover("alice@uni.edu", "pw-alice", "R1", "CS101");
    CHECK(restored == sealed.bytes);
    CHECK(s.store.get("R1", "CS101") == sealed.bytes);
    CHECK(s.cms.recover(st, "R1", "CS101") == sealed.bytes);  // idempotent
    CHECK(failure([&] { s.cms.recover("alice@uni.edu", "pw-alice", "R1", "MA201"); }) == Errc::not_found);

    const auto env = m2fe::parse(restored);
    CHECK(m2fe::decrypt(env, *e.keys.d, e.keys.n, e.keys.dna) == "CS101: A");
}

TEST_CASE("missing local copy is reported empty and recoverable") {
    Fixture f;
    auto& s = *f.stack;
    const auto e = enroll(s);
    const auto ins = s.cms.login_instructor("prof@uni.edu", "pw-prof", e.ins_nonce).token;
    const auto st = s.cms.login_student("alice@uni.edu", "pw-alice").token;
    const auto sealed = seal(e.keys, "x");
    s.cms.upload(ins, "R1", "C", sealed.bytes, sealed.hash);
    fs::remove(s.store.path_for("R1", "C"));
    const auto got = s.cms.retrieve(st, "R1", "C");
    CHECK(got.envelope.empty());
    CHECK(s.cms.recover(st, "R1", "C") == sealed.bytes);
}

TEST_CASE("students cannot read other rolls") {
    Fixture f;
    auto& s = *f.stack;
    const auto e = enroll(s);
    s.cta.register_student("bob@uni.edu", "R2");
    REQUIRE(s.cms.register_student("bob@uni.edu", "pw-bob", "R2").b == 1);
    const auto ins = s.cms.login_instructor("prof@uni.edu", "pw-prof", e.ins_nonce).token;
    const auto sealed = seal(e.keys, "secret");
    s.cms.upload(ins, "R1", "C", sealed.bytes, sealed.hash);
    const auto bob = s.cms.login_student("bob@uni.edu", "pw-bob").token;
    CHECK(failure([&] { s.cms.retrieve(bob, "R1", "C"); }) == Errc::forbidden);
    CHECK(failure([&] { s.cms.transcript(bob, "R1"); }) == Errc::forbidden);
    CHECK(failure([&] { s.cms.recover("bob@uni.edu", "pw-bob", "R1", "C"); }) == Errc::auth_failed);
    CHECK(failure([&] { s.cms.recover(bob, "R1", "C"); }) == Errc::forbidden);
}

TEST_CASE("transcript bundles every course") {
    Fixture f;
    auto& s = *f.stack;
    const auto e = enroll(s);
    const auto ins = s.cms.login_instructor("prof@uni.edu", "pw-prof", e.ins_nonce).token;
    for (const std::string c : {"MA201", "CS101", "PH110"}) {
        const auto sealed = seal(e.keys, c + ": B+");
        s.cms.upload(ins, "R1", c, sealed.bytes, sealed.hash);
    }
    const auto st = s.cms.login_student("alice@uni.edu", "pw-alice").token;
    const auto all = s.cms.transcript(st, "R1");
    REQUIRE(all.size() == 3);
    CHECK(all[0].course == "CS101");
    CHECK(all[2].course == "PH110");
    for (const auto& c : all) {
        CHECK(m2fe::decrypt(m2fe::parse(c.envelope), *e.keys.d, e.keys.n, e.keys.dna) == c.course + ": B+");
    }
}

TEST_CASE("sessions expire and state persists across restart") {
    fs::path dir = fs::temp_directory_path() / ("credsec-cms-exp-" + std::to_string(std::random_device{}()));
    fs::remove_all(dir);
    SeededRandom rng(9);
    std::uint64_t now = 1000;
    lds::LocalStore store(dir / "lds");
    ledger::Ledger chain(dir / "ledger");
    authority::Config a;
    a.lambda = 128;
    authority::CertificationAuthority cta(a, rng);
    cms::LocalAuthorityLink link(cta);
    cms::Config c;
    c.password_cost = {1u << 10, 8, 1};
    c.session_ttl_seconds = 60;
    std::string nonce;
    {
        cms::CredentialService svc(c, store, chain, link, rng, dir / "cms.json", [&] { return now; });
        cta.set_sink(&svc);
        nonce = cta.register_instructor("p@u", "I1").value;
        REQUIRE(svc.register_instructor("p@u", "pw", "I1", nonce).b == 1);
        cta.register_student("s@u", "R1");
        REQUIRE(svc.register_student("s@u", "pw", "R1").b == 1);
        const auto tok = svc.login_student("s@u", "pw").token;
        now += 61;
        CHECK(failure([&] { svc.transcript(tok, "R1"); }) == Errc::auth_failed);
    }
    cta.set_sink(nullptr);
    cms::CredentialService again(c, store, chain, link, rng, dir / "cms.json", [&] { return now; });
    CHECK(again.login_instructor("p@u", "pw", nonce).subject == "I1");
    CHECK(again.login_student("s@u", "pw").subject == "R1");
    CHECK(again.register_student("s@u", "pw", "R1").b == 0);
    fs::remove_all(dir);
}
