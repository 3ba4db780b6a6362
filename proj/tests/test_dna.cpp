#include <doctest.h>

#include <random>
#include <set>

#include "credsec/dna.hpp"
#include "credsec/error.hpp"

using namespace credsec;

namespace {

std::string random_bits(std::mt19937_64& rng, std::size_t n) {
    std::string out(n, '0');
    for (auto& c : out) c = (rng() & 1) ? '1' : '0';
    return out;
}

std::string random_digits(std::mt19937_64& rng, std::size_t n) {
    std::string out(n, '0');
    for (auto& c : out) c = static_cast<char>('0' + rng() % 10);
    return out;
}

Errc failure(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::bad_request;
}

}  // namespace

TEST_CASE("key derivation") {
    CHECK(dna::keygen({10, 7}).bits == "100110011");  // floor(307.4177) = 307
    CHECK(dna::keygen({3, 2}).bits == "1010");        // floor(10.6328) = 10
    CHECK(failure([] { dna::keygen({7, 7}); }) == Errc::invalid_params);
    CHECK(failure([] { dna::keygen({5, 1}); }) == Errc::invalid_params);
    CHECK(failure([] { dna::keygen({3, 4}); }) == Errc::invalid_params);
}

TEST_CASE("setup samples stable parameters") {
    SeededRandom rng(17);
    for (int i = 0; i < 2000; ++i) {
        const auto p = dna::setup(dna::kDefaultSecurityBits, rng);
        CHECK(p.s > p.t);
        CHECK(p.t >= 2);
        CHECK(p.s < (1u << dna::kDefaultSecurityBits));
        CHECK(dna::floor_stable(p));
    }
    const auto tiny = dna::setup(2, rng);
    CHECK(tiny.s == 3);
    CHECK(tiny.t == 2);
    CHECK_THROWS_AS(dna::setup(1, rng), Error);
    CHECK_THROWS_AS(dna::setup(40, rng), Error);
}

TEST_CASE("the 24 rules are distinct bijections") {
    std::set<std::string> seen;
    for (int id = 0; id < dna::kRuleCount; ++id) {
        const auto& r = dna::rule(id);
        CHECK(r.id == id);
        std::string perm(r.base_of.begin(), r.base_of.end());
        std::string sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == "ACGT");
        for (int v = 0; v < 4; ++v) {
            CHECK(r.value_of[static_cast<unsigned char>(r.base_of[static_cast<std::size_t>(v)])] == v);
        }
        seen.insert(perm);
    }
    CHECK(seen.size() == 24);
    CHECK(std::string(dna::rule(0).base_of.begin(), dna::rule(0).base_of.end()) == "ACGT");
    CHECK(std::string(dna::rule(23).base_of.begin(), dna::rule(23).base_of.end()) == "TGCA");
    CHECK_THROWS_AS(dna::rule(24), Error);
    CHECK_THROWS_AS(dna::rule(-1), Error);
}

TEST_CASE("encode and decode examples") {
    const dna::Key zero{"0"};
    const dna::Key one{"1"};
    CHECK(dna::encode("00011011", zero, dna::rule(0)) == "ACGT");
    CHECK(dna::encode("0000", one, dna::rule(0)) == "TT");
    CHECK(dna::decode("ACGT", zero, dna::rule(0)) == "00011011");
    CHECK(dna::decode("", zero, dna::rule(0)) == "");
    CHECK(failure([&] { dna::encode("101", zero, dna::rule(0)); }) == Errc::odd_bit_length);

    try {
        dna::decode("ACXG", zero, dna::rule(0));
        FAIL("expected InvalidBase");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_base);
        CHECK(e.position() == 2u);
    }
    try {
        dna::decode("ACGTACGTXCGa", zero, dna::rule(0), Exec::parallel);
        FAIL("expected InvalidBase");
    } catch (const Error& e) {
        CHECK(e.position() == 8u);
    }
}

TEST_CASE("encode/decode roundtrip over every rule, serial and parallel agree") {
    std::mt19937_64 rng(42);
    for (int id = 0; id < dna::kRuleCount; ++id) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::string bits = random_bits(rng, 2 * (rng() % 600));
            const dna::Key key{random_bits(rng, 1 + rng() % 40)};
            const auto& r = dna::rule(id);
            const std::string bases = dna::encode(bits, key, r);
            CHECK(bases.size() * 2 == bits.size());
            CHECK(dna::encode(bits, key, r, Exec::parallel) == bases);
            CHECK(dna::decode(bases, key, r) == bits);
            CHECK(dna::decode(bases, key, r, Exec::parallel) == bits);
        }
    }
}

TEST_CASE("dummy generation formulas") {
    SUBCASE("309-digit chunks with S=10, T=7") {
        std::mt19937_64 rng(1);
        const std::string left = random_digits(rng, 309);
        const std::string right = random_digits(rng, 309);
        const auto d = dna::dum_gen(left, right, {10, 7});
        CHECK(d.alpha == 309);
        CHECK(d.beta == 309);
        CHECK(d.lambda == 2);
        CHECK(d.delta == 6);
        CHECK(d.psi == 2);
        CHECK(d.source == dna::Side::left);
        CHECK(d.gamma == left.substr(303));
    }
    SUBCASE("delta zero") {
        const auto d = dna::dum_gen("1234", "5678", {7, 2});
        CHECK(d.delta == 0);
        CHECK(d.gamma.empty());
    }
    SUBCASE("delta clamped to the source chunk") {
        const auto d = dna::dum_gen("1234", "5678", {10, 7});
        CHECK(d.lambda == 2);
        CHECK(d.delta == 6);
        CHECK(d.delta_eff == 4);
        CHECK(d.psi == 2);
        CHECK(d.gamma == "1234");
    }
    SUBCASE("leading digits when psi is 1") {
        // 12 mod 5 = 2, (2 + 2) mod 2 = 0 -> psi 1
        const auto d = dna::dum_gen("987654", "123456", {12, 7});
        CHECK(d.psi == 1);
        CHECK(d.delta == (2 * 12) % 7);
        CHECK(d.gamma == std::string("987654").substr(0, d.delta_eff));
    }
    SUBCASE("odd lambda selects the right chunk") {
        // alpha=1, beta=8: sqrt(81/8) = 3.18 -> 3
        const auto d = dna::dum_gen("1", "23456789", {10, 7});
        CHECK(d.lambda == 3);
        CHECK(d.source == dna::Side::right);
        CHECK(d.delta == 30 % 7);
        // 10 mod 3 = 1, (3 + 1) mod 2 = 0 -> psi 1
        CHECK(d.psi == 1);
        CHECK(d.gamma == "23");
    }
    CHECK(failure([] { dna::dum_gen("", "1", {10, 7}); }) == Errc::empty_chunk);
    CHECK(failure([] { dna::dum_gen("1", "", {10, 7}); }) == Errc::empty_chunk);
}

TEST_CASE("interleave then discard recovers chunks") {
    std::mt19937_64 rng(9);
    SeededRandom prng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const auto params = dna::setup(2 + static_cast<unsigned>(rng() % 15), prng);
        const std::size_t width = 1 + rng() % 40;
        std::vector<std::string> chunks(1 + rng() % 12);
        for (auto& c : chunks) c = random_digits(rng, width);
        const std::string stream = dna::interleave(chunks, params);
        const std::size_t gap = dna::dummy_length(width, params);
        CHECK(stream.size() == chunks.size() * width + (chunks.size() - 1) * gap);
        CHECK(dna::dum_discard(stream, width, params) == chunks);
    }
    CHECK(dna::dum_discard("", 5, {10, 7}).empty());
    CHECK(dna::dum_discard("12345", 5, {10, 7}) == std::vector<std::string>{"12345"});
}

TEST_CASE("discard detects tampered dummies and truncation") {
    const std::vector<std::string> chunks = {"111122", "333344", "555566"};
    const dna::Params params{10, 7};  // dummy = last 6 digits of the left chunk
    const std::string stream = dna::interleave(chunks, params);
    CHECK(stream == "111122" "111122" "333344" "333344" "555566");

    std::string bad = stream;
    bad[8] = bad[8] == '9' ? '0' : '9';
    try {
        dna::dum_discard(bad, 6, params);
        FAIL("expected DummyMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::dummy_mismatch);
        CHECK(e.position() == 8u);
    }

    CHECK(failure([&] { dna::dum_discard(stream.substr(0, stream.size() - 1), 6, params); }) ==
          Errc::truncated_stream);
    CHECK(failure([&] { dna::dum_discard(stream + "1", 6, params); }) == Errc::truncated_stream);
    CHECK(failure([&] { dna::dum_discard("123", 6, params); }) == Errc::truncated_stream);
}
