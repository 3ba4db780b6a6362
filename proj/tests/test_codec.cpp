#include <doctest.h>

#include <random>
#include <set>

#include "credsec/codec.hpp"
#include "credsec/error.hpp"

using namespace credsec;

TEST_CASE("table is a bijection onto 1..95") {
    std::set<int> codes;
    for (char ch : codec::kAlphabet) {
        const int code = codec::code_of(ch);
        CHECK(code >= 1);
        CHECK(code <= 95);
        codes.insert(code);
        CHECK(codec::char_of(code) == ch);
    }
    CHECK(codes.size() == 95);
    CHECK(codec::char_of(0) == '\0');
    CHECK(codec::char_of(96) == '\0');
}

TEST_CASE("published table rows") {
    CHECK(codec::code_of('0') == 1);
    CHECK(codec::code_of('6') == 7);
    CHECK(codec::code_of('H') == 18);
    CHECK(codec::code_of('i') == 45);
    CHECK(codec::code_of('z') == 62);
    CHECK(codec::code_of(' ') == 63);
    CHECK(codec::code_of('!') == 64);
    CHECK(codec::code_of('@') == 84);
    CHECK(codec::code_of('$') == 85);
    CHECK(codec::code_of('\\') == 89);
    CHECK(codec::code_of('~') == 92);
    CHECK(codec::code_of('{') == 93);
    CHECK(codec::code_of('|') == 94);
    CHECK(codec::code_of('}') == 95);
}

TEST_CASE("encode examples") {
    CHECK(codec::c2i_encode("H") == "18");
    CHECK(codec::c2i_encode("Hi") == "1845");
    CHECK(codec::c2i_encode("") == "");
    CHECK(codec::c2i_encode("6") == "07");
}

TEST_CASE("encode rejects characters outside the alphabet") {
    try {
        codec::c2i_encode("ab\tc");
        FAIL("expected UnknownCharacter");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_character);
        CHECK(e.position() == 2u);
    }
    CHECK_THROWS_AS(codec::c2i_encode("\xC3\xA9"), Error);
}

TEST_CASE("decode examples and errors") {
    CHECK(codec::c2i_decode("1845") == "Hi");
    CHECK(codec::c2i_decode("") == "");

    auto code_of_failure = [](std::string_view digits) {
        try {
            codec::c2i_decode(digits);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::bad_request;
    };
    CHECK(code_of_failure("96") == Errc::code_out_of_range);
    CHECK(code_of_failure("00") == Errc::code_out_of_range);
    CHECK(code_of_failure("99") == Errc::code_out_of_range);
    CHECK(code_of_failure("1") == Errc::odd_length);
    CHECK(code_of_failure("1x") == Errc::code_out_of_range);

    try {
        codec::c2i_decode("184500");
    } catch (const Error& e) {
        CHECK(e.position() == 2u);
    }
}

TEST_CASE("roundtrip and size law over random strings") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, codec::kAlphabet.size() - 1);
    std::uniform_int_distribution<std::size_t> len(0, 300);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text(len(rng), ' ');
        for (auto& ch : text) ch = codec::kAlphabet[pick(rng)];
        const std::string digits = codec::c2i_encode(text);
        CHECK(digits.size() == 2 * text.size());
        CHECK(codec::c2i_decode(digits) == text);
    }
}

TEST_CASE("table listing has 95 rows") {
    const std::string listing = codec::table_listing();
    CHECK(std::count(listing.begin(), listing.end(), '\n') == 95);
    CHECK(listing.rfind("0\t01\n", 0) == 0);
    CHECK(listing.find("SPACE\t63\n") != std::string::npos);
    CHECK(listing.find("|\t94\n") != std::string::npos);
}
