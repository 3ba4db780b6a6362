// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
//
//   acceptance            all criteria
//   acceptance 4 9        only the listed ones

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "credsec/codec.hpp"
#include "credsec/error.hpp"
#include "credsec/ledger_maintenance.hpp"
#include "credsec/m2fe.hpp"
#include "credsec/stack.hpp"
#include "credsec/tamper.hpp"

using namespace credsec;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kKiB = 1024;
const std::vector<std::size_t> kSizes = {50 * kKiB, 100 * kKiB, 200 * kKiB, 300 * kKiB, 500 * kKiB};

// Frozen from tests/oracles/golden_hi.py.
constexpr const char* kGoldenHiEnvelope = "43534543010003000400000000000000040000000000000030a8ded761091a";
constexpr const char* kGoldenHiSha256 = "2a10d0ad42bfc2e77b83b0ac3a68b21594ec46f1b6025a30688b2ad097dcd79b";

struct Result {
    bool pass = false;
    std::string detail;
};

std::mt19937_64 prng(20240601);

std::string random_text(std::size_t len) {
    std::string s(len, ' ');
    for (auto& c : s) {
        c = codec::kAlphabet[prng() % codec::kAlphabet.size()];
    }
    return s;
}

m2fe::DnaMaterial random_dna(RandomSource& rng) {
    m2fe::DnaMaterial m;
    m.params = dna::setup(dna::kDefaultSecurityBits, rng);
    m.key = dna::keygen(m.params);
    m.rule = static_cast<int>(rng.uniform(0, dna::kRuleCount - 1));
    return m;
}

struct Key {
    rsa::Params params;
    rsa::Keys keys;
};

// One 1024-bit, e = 65537 key shared by the pipeline criteria.
const Key& key1024() {
    static const Key k = [] {
        SeededRandom rng(1024);
        Key out;
        out.params = rsa::setup(1024, rng);
        out.keys = rsa::keygen(out.params, rng);
        return out;
    }();
    return k;
}

struct Sized {
    std::size_t size;
    std::string text;
    m2fe::DnaMaterial dna;
    m2fe::Sealed sealed;
};

// Large credentials at the five benchmark sizes, encrypted once and reused.
const std::vector<Sized>& sized() {
    static const std::vector<Sized> v = [] {
        SeededRandom rng(55);
        const auto& k = key1024();
        std::vector<Sized> out;
        for (const std::size_t size : kSizes) {
            Sized s{size, random_text(size), random_dna(rng), {}};
            s.sealed = m2fe::encrypt(s.text, k.keys.e, k.params.n, s.dna);
            out.push_back(std::move(s));
        }
        return out;
    }();
    return v;
}

struct TempDir {
    fs::path path;
    TempDir() { path = fs::temp_directory_path() / ("credsec-accept-" + std::to_string(std::random_device{}())); }
    ~TempDir() { fs::remove_all(path); }
};

Result roundtrip() {
    const auto& k = key1024();
    SeededRandom rng(1);
    std::size_t ok = 0;
    std::size_t total = 0;
    std::string first_failure;
    for (int i = 0; i < 1000; ++i) {
        const std::string text = random_text(prng() % 4097);
        const auto dna = random_dna(rng);
        ++total;
        try {
            const auto sealed = m2fe::encrypt(text, k.keys.e, k.params.n, dna);
            if (m2fe::decrypt(m2fe::parse(sealed.bytes), k.keys.d, k.params.n, dna) == text) {
                ++ok;
            } else if (first_failure.empty()) {
                first_failure = "mismatch at case " + std::to_string(i);
            }
        } catch (const std::exception& e) {
            if (first_failure.empty()) first_failure = e.what();
        }
    }
    for (const auto& s : sized()) {
        ++total;
        try {
            if (m2fe::decrypt(m2fe::parse(s.sealed.bytes), k.keys.d, k.params.n, s.dna) == s.text) {
                ++ok;
            } else if (first_failure.empty()) {
                first_failure = "mismatch at " + std::to_string(s.size) + " bytes";
            }
        } catch (const std::exception& e) {
            if (first_failure.empty()) first_failure = e.what();
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " byte-exact" +
                             (first_failure.empty() ? "" : "; " + first_failure)};
}

Result c2i_size() {
    std::size_t ok = 0;
    for (int i = 0; i < 100; ++i) {
        const std::string t = random_text(1 + prng() % 2000);
        const std::string digits = codec::c2i_encode(t);
        // 2 digits per character against 3 for ASCII decimal: a third smaller.
        if (digits.size() == 2 * t.size() && 3 * digits.size() == 2 * (3 * t.size()) &&
            codec::c2i_decode(digits) == t) {
            ++ok;
        }
    }
    return {ok == 100, std::to_string(ok) + "/100 strings with len = 2n (33.3% below 3n)"};
}

Result golden() {
    const dna::Params p{10, 7};
    const m2fe::DnaMaterial mat{dna::keygen(p), 0, p};
    m2fe::EncryptOptions opt;
    opt.chunk_digits = 3;
    int ok = 0;
    for (int run = 0; run < 3; ++run) {
        for (auto exec : {Exec::serial, Exec::parallel}) {
            opt.exec = exec;
            const auto sealed = m2fe::encrypt("Hi", 17, 3233, mat, opt);
            if (to_hex(sealed.bytes) == kGoldenHiEnvelope && sealed.hash.hex() == kGoldenHiSha256 &&
                m2fe::decrypt(m2fe::parse(sealed.bytes), 2753, 3233, mat, exec) == "Hi") {
                ++ok;
            }
        }
    }
    return {ok == 6, std::to_string(ok) + "/6 runs reproduce envelope " + std::string(kGoldenHiEnvelope)};
}

Result tamper_recover() {
    TempDir dir;
    SystemRandom sys;
    authority::Config ac;  // lambda 1024, e = 65537
    cms::Config cc;
    cc.password_cost = {1u << 10, 8, 1};
    LocalStack s(dir.path, ac, cc, sys);

    const std::string nonce = s.cta.register_instructor("ins@acc", "I1").value;
    if (s.cms.register_instructor("ins@acc", "ipw", "I1", nonce).b != 1) {
        return {false, "instructor registration failed"};
    }
    const std::string ins = s.cms.login_instructor("ins@acc", "ipw", nonce).token;
    struct Stu {
        std::string roll, token;
        KeyBundle keys, ins_copy;
    };
    std::vector<Stu> students;
    for (int i = 0; i < 4; ++i) {
        Stu st;
        st.roll = "R" + std::to_string(i);
        const std::string email = "s" + std::to_string(i) + "@acc";
        st.keys = s.cta.register_student(email, st.roll);
        s.cms.register_student(email, "spw", st.roll);
        st.token = s.cms.login_student(email, "spw").token;
        st.ins_copy = s.cta.instructor_keys("I1", nonce, st.roll);
        students.push_back(std::move(st));
    }

    int ok = 0;
    std::string first_failure;
    for (int trial = 0; trial < 100; ++trial) {
        const auto& st = students[prng() % students.size()];
        const std::string course = "T" + std::to_string(trial);
        const std::string text = random_text(1 + prng() % 2048);
        try {
            const auto sealed = m2fe::encrypt(text, st.ins_copy.e, st.ins_copy.n, st.ins_copy.dna);
            s.cms.upload(ins, st.roll, course, sealed.bytes, sealed.hash);

            tamper::Mutation m;
            m.offset = prng() % sealed.bytes.size();
            m.mask = static_cast<std::uint8_t>(1 + prng() % 255);
            const std::vector<tamper::Mutation> muts = {m};
            tamper::lds(s.store.root(), st.roll, course, muts);

            auto got = s.cms.retrieve(st.token, st.roll, course);
            const int b0 = m2fe::credential_verify(m2fe::CredentialHash::of(got.envelope), got.hash);
            const Bytes restored = s.cms.recover(st.token, st.roll, course);
            const int b1 = m2fe::credential_verify(m2fe::CredentialHash::of(restored), got.hash);
            const std::string plain =
                m2fe::decrypt(m2fe::parse(restored), st.keys.private_exponent(), st.keys.n, st.keys.dna);
            if (b0 == 0 && b1 == 1 && plain == text) {
                ++ok;
            } else if (first_failure.empty()) {
                first_failure = "trial " + std::to_string(trial);
            }
        } catch (const std::exception& e) {
            if (first_failure.empty()) first_failure = e.what();
        }
    }
    return {ok == 100,
            std::to_string(ok) + "/100 detect-recover-decrypt" + (first_failure.empty() ? "" : "; " + first_failure)};
}

Result ledger_immutability() {
    TempDir dir;
    {
        ledger::Ledger chain(dir.path);
        for (int i = 0; i < 20; ++i) {
            const std::string body = random_text(64 + prng() % 512);
            chain.append({ledger::Record::make("R" + std::to_string(i % 5), "C" + std::to_string(i),
                                               Bytes(body.begin(), body.end()), "I1")});
        }
        if (!chain.verify().ok) {
            return {false, "fresh chain does not verify"};
        }
    }
    int detected = 0;
    std::string first_failure;
    for (std::uint64_t idx = 0; idx < 20; ++idx) {
        const std::uint64_t bits = 8 * ledger::maintenance::frame_size(dir.path, idx);
        std::set<std::uint64_t> picked;
        while (picked.size() < 8) {
            picked.insert(prng() % bits);
        }
        for (const std::uint64_t bit : picked) {
            ledger::maintenance::flip_bit(dir.path, idx, bit);
            const auto v = ledger::Ledger(dir.path).verify();
            if (!v.ok && v.first_bad_index && *v.first_bad_index <= idx + 1) {
                ++detected;
            } else if (first_failure.empty()) {
                first_failure = "block " + std::to_string(idx) + " bit " + std::to_string(bit);
            }
            ledger::maintenance::flip_bit(dir.path, idx, bit);
        }
    }
    const bool restored = ledger::Ledger(dir.path).verify().ok;
    return {detected == 160 && restored, std::to_string(detected) + "/160 single-bit flips detected" +
                                             (first_failure.empty() ? "" : "; missed " + first_failure)};
}

Result size_law() {
    const auto& k = key1024();
    const std::size_t width = rsa::decimal_width(k.params.n);
    int exact = 0;
    double lo = 1e300;
    double hi = 0;
    for (const auto& s : sized()) {
        const auto& env = s.sealed.envelope;
        const std::uint64_t n = (env.digit_count + env.chunk_digits - 1) / env.chunk_digits;
        const std::uint64_t dummy = dna::dummy_length(width, s.dna.params);
        const std::uint64_t law = 4 * (n * width + (n - 1) * dummy);
        if (env.payload_bit_length() == law &&
            law == m2fe::predicted_payload_bits(env.digit_count, env.chunk_digits, width, s.dna.params)) {
            ++exact;
        }
        const double ratio = double(s.sealed.bytes.size()) / double(s.size);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    const double spread = (hi - lo) / lo;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d/5 sizes match 4(nD+(n-1)dummy); cipher/plain %.4f..%.4f (spread %.2f%%)", exact,
                  lo, hi, 100 * spread);
    return {exact == 5 && spread <= 0.05, buf};
}

Result time_parity() {
    SeededRandom rng(77);
    const auto params = rsa::setup(1024, rng);
    const auto keys = rsa::keygen(params, rng, rsa::ExponentMode::random_full);
    const auto dna = random_dna(rng);
    const std::string text = random_text(100 * kKiB);
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto sealed = m2fe::encrypt(text, keys.e, params.n, dna);
    const auto t1 = clock::now();
    const std::string plain = m2fe::decrypt(sealed.envelope, keys.d, params.n, dna);
    const auto t2 = clock::now();
    const double enc = std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double dec = std::chrono::duration<double, std::milli>(t2 - t1).count();
    const double ratio = std::max(enc, dec) / std::min(enc, dec);
    char buf[512];
    std::snprintf(buf, sizeof buf, "e bits %zu; enc %.0f ms, dec %.0f ms, ratio %.2f (limit 3)",
                  mpz_sizeinbase(keys.e.get_mpz_t(), 2), enc, dec, ratio);
    return {plain == text && ratio <= 3.0, buf};
}

Result auth_gates() {
    TempDir dir;
    SystemRandom sys;
    authority::Config ac;
    ac.lambda = 256;  // the gates do not depend on the modulus size
    cms::Config cc;
    cc.password_cost = {1u << 10, 8, 1};
    LocalStack s(dir.path, ac, cc, sys);

    auto rejected = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code() == Errc::auth_failed;
        }
        return false;
    };

    int ok = 0;
    std::string first_failure;
    for (int t = 0; t < 50; ++t) {
        const std::string tag = std::to_string(t);
        const std::string ie = "ins" + tag + "@acc", id = "I" + tag, ipw = sys.hex_token(8);
        const std::string se = "std" + tag + "@acc", roll = "R" + tag, spw = sys.hex_token(8);
        const std::string nonce = s.cta.register_instructor(ie, id).value;
        std::string wrong_nonce = sys.hex_token(16);
        const std::string wrong_pw = ipw + "x";

        bool good = true;
        good &= s.cms.register_instructor(ie, ipw, id, wrong_nonce).b == 0;
        good &= s.cms.register_instructor(ie, ipw, id, nonce).b == 1;
        good &= rejected([&] { s.cms.login_instructor(ie, ipw, wrong_nonce); });
        good &= rejected([&] { s.cms.login_instructor(ie, wrong_pw, nonce); });
        good &= !s.cms.login_instructor(ie, ipw, nonce).token.empty();

        s.cta.register_student(se, roll);
        good &= s.cms.register_student(se, spw, roll).b == 1;
        good &= rejected([&] { s.cms.login_student(se, spw + "!"); });
        good &= rejected([&] { s.cms.login_student(se, ipw); });
        good &= s.cms.login_student(se, spw).subject == roll;
        if (good) {
            ++ok;
        } else if (first_failure.empty()) {
            first_failure = "trial " + tag;
        }
    }
    return {ok == 50, std::to_string(ok) + "/50 trials: wrong nonce/password rejected, correct accepted" +
                          (first_failure.empty() ? "" : "; " + first_failure)};
}

Result dummy_channel() {
    const auto& k = key1024();
    const std::size_t width = rsa::decimal_width(k.params.n);
    SeededRandom rng(9);
    int ok = 0;
    std::string first_failure;
    for (int t = 0; t < 50; ++t) {
        m2fe::DnaMaterial dna;
        std::size_t dummy = 0;
        do {
            dna = random_dna(rng);
            dummy = dna::dummy_length(width, dna.params);
        } while (dummy == 0);

        const auto sealed = m2fe::encrypt(random_text(151 + prng() % 1500), k.keys.e, k.params.n, dna);
        const auto& rule = dna::rule(dna.rule);
        std::string stream =
            m2fe::kernels::bits_to_digits(dna::decode(sealed.envelope.payload, dna.key, rule), Exec::serial);
        const std::size_t chunks = (sealed.envelope.digit_count + sealed.envelope.chunk_digits - 1) /
                                   sealed.envelope.chunk_digits;
        // Dummy g sits after chunk g: [ (g+1)D + g*dummy, +dummy ).
        const std::size_t g = prng() % (chunks - 1);
        const std::size_t pos = (g + 1) * width + g * dummy + prng() % dummy;
        stream[pos] = static_cast<char>('0' + (stream[pos] - '0' + 1 + prng() % 9) % 10);
        auto env = sealed.envelope;
        env.payload = dna::encode(m2fe::kernels::digits_to_bits(stream, Exec::serial), dna.key, rule);
        try {
            m2fe::decrypt(env, k.keys.d, k.params.n, dna);
            if (first_failure.empty()) first_failure = "trial " + std::to_string(t) + " decrypted";
        } catch (const IntegrityError& e) {
            if (e.cause() == Errc::dummy_mismatch) {
                ++ok;
            } else if (first_failure.empty()) {
                first_failure = std::string("trial ") + std::to_string(t) + ": " + e.what();
            }
        }
    }
    return {ok == 50, std::to_string(ok) + "/50 dummy-only corruptions raised DummyMismatch" +
                          (first_failure.empty() ? "" : "; " + first_failure)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
        {"m2fe roundtrip", roundtrip},
        {"c2i size", c2i_size},
        {"golden pipeline vector", golden},
        {"tamper detect and recover", tamper_recover},
        {"ledger immutability", ledger_immutability},
        {"ciphertext size law", size_law},
        {"enc/dec time parity", time_parity},
        {"authentication gates", auth_gates},
        {"dummy verification channel", dummy_channel},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::atoi(argv[i]));
    }

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if (!only.empty() && !only.contains(n)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %d %s: %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", n, criteria[i].first, r.detail.c_str(), secs);
        std::fflush(stdout);
        failed += r.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
