#include "credsec/rsa.hpp"

#include <array>

#include "credsec/error.hpp"

namespace credsec::rsa {
namespace {

constexpr std::array<unsigned, 54> kSmallPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,
    67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151,
    157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251};

void check_range(const mpz_class& value, const mpz_class& n, const char* what) {
    if (value < 0 || value >= n) {
        throw Error(Errc::message_too_large, std::string(what) + " must lie in [0, N)");
    }
}

}  // namespace

mpz_class modexp(const mpz_class& base, const mpz_class& exponent, const mpz_class& modulus, ModexpStats* stats) {
    if (modulus <= 0 || exponent < 0 || base < 0) {
        throw Error(Errc::invalid_params, "modexp needs a positive modulus and non-negative operands");
    }
    if (modulus == 1) {
        return 0;
    }
    mpz_class b = base % modulus;
    mpz_class acc = 1;
    if (exponent == 0) {
        return acc;
    }
    ModexpStats local;
    const std::size_t top = mpz_sizeinbase(exponent.get_mpz_t(), 2);
    acc = b;
    mpz_class tmp;
    for (std::size_t i = top - 1; i-- > 0;) {
        mpz_mul(tmp.get_mpz_t(), acc.get_mpz_t(), acc.get_mpz_t());
        mpz_tdiv_r(acc.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
        ++local.squarings;
        if (mpz_tstbit(exponent.get_mpz_t(), i)) {
            mpz_mul(tmp.get_mpz_t(), acc.get_mpz_t(), b.get_mpz_t());
            mpz_tdiv_r(acc.get_mpz_t(), tmp.get_mpz_t(), modulus.get_mpz_t());
            ++local.multiplications;
        }
    }
    if (stats != nullptr) {
        stats->squarings += local.squarings;
        stats->multiplications += local.multiplications;
    }
    return acc;
}

bool is_probable_prime(const mpz_class& n, RandomSource& rng, int rounds) {
    if (n < 2) {
        return false;
    }
    for (unsigned sp : kSmallPrimes) {
        if (n == sp) {
            return true;
        }
        if (mpz_divisible_ui_p(n.get_mpz_t(), sp)) {
            return false;
        }
    }
    // n - 1 = 2^s * r with r odd
    const mpz_class n_minus_1 = n - 1;
    const auto s = mpz_scan1(n_minus_1.get_mpz_t(), 0);
    mpz_class r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), n_minus_1.get_mpz_t(), s);

    const mpz_class witness_span = n - 3;  // witnesses in [2, n-2]
    for (int round = 0; round < rounds; ++round) {
        const mpz_class a = 2 + rng.below(witness_span);
        mpz_class y = modexp(a, r, n);
        if (y == 1 || y == n_minus_1) {
            continue;
        }
        bool composite = true;
        for (mp_bitcnt_t j = 1; j < s; ++j) {
            y = y * y % n;
            if (y == n_minus_1) {
                composite = false;
                break;
            }
            if (y == 1) {
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

mpz_class random_prime(unsigned bits, RandomSource& rng, const mpz_class& exponent) {
    if (bits < 3) {
        throw Error(Errc::invalid_params, "prime size must be at least 3 bits");
    }
    for (;;) {
        mpz_class candidate = rng.bits(bits);
        mpz_setbit(candidate.get_mpz_t(), bits - 1);
        mpz_setbit(candidate.get_mpz_t(), bits - 2);
        mpz_setbit(candidate.get_mpz_t(), 0);
        if (exponent != 0) {
            mpz_class g;
            const mpz_class pm1 = candidate - 1;
            mpz_gcd(g.get_mpz_t(), exponent.get_mpz_t(), pm1.get_mpz_t());
            if (g != 1) {
                continue;
            }
        }
        if (is_probable_prime(candidate, rng)) {
            return candidate;
        }
    }
}

Params setup(unsigned lambda, RandomSource& rng) {
    if (lambda < kMinLambda) {
        throw Error(Errc::invalid_params, "lambda must be at least " + std::to_string(kMinLambda));
    }
    const unsigned p_bits = (lambda + 1) / 2;
    const unsigned q_bits = lambda - p_bits;
    Params out;
    out.lambda = lambda;
    out.p = random_prime(p_bits, rng, kDefaultExponent);
    do {
        out.q = random_prime(q_bits, rng, kDefaultExponent);
    } while (out.q == out.p);
    out.n = out.p * out.q;
    return out;
}

Params from_primes(const mpz_class& p, const mpz_class& q) {
    SeededRandom witnesses(0x5eed);
    if (p == q || !is_probable_prime(p, witnesses) || !is_probable_prime(q, witnesses)) {
        throw Error(Errc::invalid_params, "p and q must be distinct primes");
    }
    Params out;
    out.p = p;
    out.q = q;
    out.n = p * q;
    out.lambda = static_cast<unsigned>(mpz_sizeinbase(out.n.get_mpz_t(), 2));
    return out;
}

mpz_class carmichael(const Params& params) {
    mpz_class out;
    const mpz_class pm1 = params.p - 1;
    const mpz_class qm1 = params.q - 1;
    mpz_lcm(out.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    return out;
}

Keys keygen_with_exponent(const Params& params, const mpz_class& e) {
    const mpz_class l = carmichael(params);
    Keys out;
    out.e = e;
    if (e < 2 || mpz_invert(out.d.get_mpz_t(), e.get_mpz_t(), l.get_mpz_t()) == 0) {
        throw Error(Errc::invalid_params, "public exponent is not invertible modulo lcm(p-1, q-1)");
    }
    return out;
}

Keys keygen(const Params& params, RandomSource& rng, ExponentMode mode) {
    if (mode == ExponentMode::fixed_65537) {
        return keygen_with_exponent(params, kDefaultExponent);
    }
    const mpz_class l = carmichael(params);
    const unsigned l_bits = static_cast<unsigned>(mpz_sizeinbase(l.get_mpz_t(), 2));
    for (;;) {
        mpz_class e = rng.bits(l_bits);
        mpz_setbit(e.get_mpz_t(), l_bits - 1);
        mpz_setbit(e.get_mpz_t(), 0);
        if (e >= l) {
            continue;
        }
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), e.get_mpz_t(), l.get_mpz_t());
        if (g == 1) {
            return keygen_with_exponent(params, e);
        }
    }
}

mpz_class encrypt(const mpz_class& m, const mpz_class& e, const mpz_class& n, ModexpStats* stats) {
    check_range(m, n, "message");
    return modexp(m, e, n, stats);
}

mpz_class decrypt(const mpz_class& c, const mpz_class& d, const mpz_class& n, ModexpStats* stats) {
    check_range(c, n, "ciphertext");
    return modexp(c, d, n, stats);
}

std::size_t decimal_width(const mpz_class& n) {
    return n.get_str(10).size();
}

mpz_class from_decimal(const std::string& digits) {
    mpz_class out;
    if (digits.empty() || out.set_str(digits, 10) != 0 || out < 0) {
        throw Error(Errc::bad_request, "not a decimal integer");
    }
    return out;
}

}  // namespace credsec::rsa
