#include "credsec/password.hpp"

#include <openssl/evp.h>

#include <stdexcept>
#include <vector>

#include "credsec/digest.hpp"

namespace credsec::password {
namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kHashBytes = 32;

Bytes derive(std::string_view password, std::span<const std::uint8_t> salt, const Cost& cost) {
    Bytes out(kHashBytes);
    const std::uint64_t max_mem = 128 * cost.r * cost.n * cost.p + (std::uint64_t{64} << 20);
    if (EVP_PBE_scrypt(password.data(), password.size(), salt.data(), salt.size(), cost.n, cost.r, cost.p, max_mem,
                       out.data(), out.size()) != 1) {
        throw std::runtime_error("scrypt failed");
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::string hash(std::string_view password, RandomSource& rng, const Cost& cost) {
    Bytes salt(kSaltBytes);
    rng.fill(salt);
    const Bytes h = derive(password, salt, cost);
    return "scrypt$" + std::to_string(cost.n) + "$" + std::to_string(cost.r) + "$" + std::to_string(cost.p) + "$" +
           to_hex(salt) + "$" + to_hex(h);
}

bool verify(std::string_view password, std::string_view digest) {
    const auto parts = split(digest, '$');
    if (parts.size() != 6 || parts[0] != "scrypt") {
        return false;
    }
    try {
        Cost cost;
        cost.n = std::stoull(std::string(parts[1]));
        cost.r = std::stoull(std::string(parts[2]));
        cost.p = std::stoull(std::string(parts[3]));
        if (cost.n < 2 || cost.n > (1u << 20) || cost.r == 0 || cost.r > 32 || cost.p == 0 || cost.p > 16) {
            return false;
        }
        const Bytes salt = from_hex(parts[4]);
        const Bytes expected = from_hex(parts[5]);
        return constant_time_equal(derive(password, salt, cost), expected);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace credsec::password
