#include "credsec/dna.hpp"

#include <algorithm>
#include <cmath>

#include "credsec/error.hpp"

namespace credsec::dna {
namespace {

std::array<Rule, kRuleCount> build_rules() {
    std::array<Rule, kRuleCount> rules{};
    std::array<char, 4> perm = {'A', 'C', 'G', 'T'};
    for (int id = 0; id < kRuleCount; ++id) {
        Rule& r = rules[static_cast<std::size_t>(id)];
        r.id = id;
        r.base_of = perm;
        r.value_of.fill(-1);
        for (int v = 0; v < 4; ++v) {
            r.value_of[static_cast<unsigned char>(perm[static_cast<std::size_t>(v)])] = static_cast<std::int8_t>(v);
        }
        std::next_permutation(perm.begin(), perm.end());
    }
    return rules;
}

const std::array<Rule, kRuleCount>& rules() {
    static const auto table = build_rules();
    return table;
}

inline int bit_at(std::string_view bits, std::size_t i) {
    return bits[i] == '1' ? 1 : 0;
}

}  // namespace

void validate(const Params& params) {
    if (params.t < 2 || params.s <= params.t) {
        throw Error(Errc::invalid_params, "DNA parameters need S > T >= 2");
    }
}

double key_real(const Params& params) {
    const double s = static_cast<double>(params.s);
    const double t = static_cast<double>(params.t);
    return std::log(s) * t * t + std::log(t) * s * s;
}

bool floor_stable(const Params& params) {
    const double v = key_real(params);
    const double margin = std::max(1e-9, v * 1e-13);
    const double frac = v - std::floor(v);
    return frac > margin && 1.0 - frac > margin;
}

Params setup(unsigned security_bits, RandomSource& rng) {
    if (security_bits < 2 || security_bits > kMaxSecurityBits) {
        throw Error(Errc::invalid_params, "DNA security parameter must be in [2, 16]");
    }
    const std::uint64_t top = (std::uint64_t{1} << security_bits) - 1;
    for (;;) {
        Params p;
        p.t = rng.uniform(2, top - 1);
        p.s = rng.uniform(p.t + 1, top);
        if (floor_stable(p)) {
            return p;
        }
    }
}

Key keygen(const Params& params) {
    validate(params);
    auto value = static_cast<std::uint64_t>(std::floor(key_real(params)));
    Key key;
    if (value == 0) {
        key.bits = "0";
        return key;
    }
    while (value != 0) {
        key.bits.push_back((value & 1) != 0 ? '1' : '0');
        value >>= 1;
    }
    std::reverse(key.bits.begin(), key.bits.end());
    return key;
}

const Rule& rule(int id) {
    if (id < 0 || id >= kRuleCount) {
        throw Error(Errc::invalid_params, "DNA rule id must be in [0, 23]");
    }
    return rules()[static_cast<std::size_t>(id)];
}

std::string encode(std::string_view bits, const Key& key, const Rule& r, Exec exec) {
    if (bits.size() % 2 != 0) {
        throw Error(Errc::odd_bit_length, "bit string length " + std::to_string(bits.size()) + " is odd");
    }
    const std::string_view k = key.bits;
    const std::size_t eps = k.size();
    const auto count = static_cast<std::ptrdiff_t>(bits.size() / 2);
    std::string out(static_cast<std::size_t>(count), '\0');

    auto one = [&](std::ptrdiff_t i) {
        const auto j = static_cast<std::size_t>(2 * i);
        const int hi = bit_at(bits, j) ^ bit_at(k, j % eps);
        const int lo = bit_at(bits, j + 1) ^ bit_at(k, (j + 1) % eps);
        out[static_cast<std::size_t>(i)] = r.base_of[static_cast<std::size_t>(hi << 1 | lo)];
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            one(i);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            one(i);
        }
    }
    return out;
}

BitString decode(std::string_view bases, const Key& key, const Rule& r, Exec exec) {
    const std::string_view k = key.bits;
    const std::size_t eps = k.size();
    const auto count = static_cast<std::ptrdiff_t>(bases.size());
    BitString out(bases.size() * 2, '0');

    // Invalid bases are located serially afterwards so the reported position
    // is always the first one.
    bool bad = false;
    auto one = [&](std::ptrdiff_t i) -> bool {
        const int v = r.value_of[static_cast<unsigned char>(bases[static_cast<std::size_t>(i)])];
        if (v < 0) {
            return false;
        }
        const auto j = static_cast<std::size_t>(2 * i);
        out[j] = static_cast<char>('0' + (((v >> 1) & 1) ^ bit_at(k, j % eps)));
        out[j + 1] = static_cast<char>('0' + ((v & 1) ^ bit_at(k, (j + 1) % eps)));
        return true;
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(|| : bad)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            bad = !one(i) || bad;
        }
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            if (!one(i)) {
                bad = true;
                break;
            }
        }
    }
    if (bad) {
        for (std::size_t i = 0; i < bases.size(); ++i) {
            if (r.value_of[static_cast<unsigned char>(bases[i])] < 0) {
                throw Error(Errc::invalid_base, "invalid DNA base at position " + std::to_string(i), i);
            }
        }
    }
    return out;
}

DummySpec dum_gen(std::string_view left, std::string_view right, const Params& params) {
    validate(params);
    if (left.empty() || right.empty()) {
        throw Error(Errc::empty_chunk, "dummy generation needs two non-empty chunks");
    }
    DummySpec d;
    d.alpha = left.size();
    d.beta = right.size();
    const double a = static_cast<double>(d.alpha);
    const double b = static_cast<double>(d.beta);
    d.lambda = static_cast<std::uint64_t>(std::floor(std::sqrt((a + b) * (a + b) / (a * b)) + 0.5));
    d.delta = (d.lambda * params.s) % params.t;
    d.psi = 1 + static_cast<int>((d.lambda + params.s % (params.s - params.t)) % 2);
    d.source = (d.lambda % 2 == 1) ? Side::right : Side::left;

    const std::string_view src = d.source == Side::right ? right : left;
    d.delta_eff = static_cast<std::size_t>(std::min<std::uint64_t>(d.delta, src.size()));
    d.gamma = d.psi == 1 ? std::string(src.substr(0, d.delta_eff))
                         : std::string(src.substr(src.size() - d.delta_eff));
    return d;
}

std::size_t dummy_length(std::size_t width, const Params& params) {
    const std::string probe(width, '0');
    return dum_gen(probe, probe, params).delta_eff;
}

std::string interleave(std::span<const std::string> chunks, const Params& params) {
    std::string out;
    if (chunks.empty()) {
        return out;
    }
    out += chunks[0];
    for (std::size_t i = 1; i < chunks.size(); ++i) {
        out += dum_gen(chunks[i - 1], chunks[i], params).gamma;
        out += chunks[i];
    }
    return out;
}

std::vector<std::string> dum_discard(std::string_view stream, std::size_t width, const Params& params) {
    validate(params);
    if (width == 0) {
        throw Error(Errc::invalid_params, "chunk width must be positive");
    }
    std::vector<std::string> chunks;
    if (stream.empty()) {
        return chunks;
    }
    if (stream.size() < width) {
        throw Error(Errc::truncated_stream, "stream shorter than one chunk", stream.size());
    }
    const std::size_t gap = dummy_length(width, params);
    chunks.emplace_back(stream.substr(0, width));
    std::size_t pos = width;
    while (pos < stream.size()) {
        if (stream.size() - pos < gap + width) {
            throw Error(Errc::truncated_stream, "stream ends inside a dummy or chunk", pos);
        }
        const std::string_view dummy = stream.substr(pos, gap);
        std::string next(stream.substr(pos + gap, width));
        const DummySpec expected = dum_gen(chunks.back(), next, params);
        for (std::size_t i = 0; i < gap; ++i) {
            if (dummy[i] != expected.gamma[i]) {
                throw Error(Errc::dummy_mismatch, "dummy digit differs at stream offset " + std::to_string(pos + i),
                            pos + i);
            }
        }
        chunks.push_back(std::move(next));
        pos += gap + width;
    }
    return chunks;
}

}  // namespace credsec::dna
