#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "credsec/random.hpp"

namespace credsec::password {

/// scrypt cost parameters. The defaults use 16 MiB per hash.
struct Cost {
    std::uint64_t n = 1u << 14;
    std::uint64_t r = 8;
    std::uint64_t p = 1;
};

/// "scrypt$N$r$p$<salt hex>$<hash hex>" with a fresh 16-byte salt.
std::string hash(std::string_view password, RandomSource& rng, const Cost& cost = {});

/// Constant-time check of `password` against a digest produced by hash().
/// Malformed digests never verify.
bool verify(std::string_view password, std::string_view digest);

}  // namespace credsec::password
