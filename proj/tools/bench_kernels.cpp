// Serial reference loops against their OpenMP counterparts, per pipeline stage.

#include <benchmark/benchmark.h>

#include "credsec/codec.hpp"
#include "credsec/m2fe.hpp"
#include "credsec/rsa.hpp"

using namespace credsec;

namespace {

struct Fixture {
    rsa::Params params;
    rsa::Keys keys;
    dna::Params dna_params;
    dna::Key dna_key;
    std::vector<std::string> chunks;
    std::vector<std::string> cipher;
    std::vector<std::size_t> widths;
    std::string digits;
    dna::BitString bits;
    std::string bases;

    Fixture() {
        SeededRandom rng(7);
        params = rsa::setup(1024, rng);
        keys = rsa::keygen(params, rng);
        dna_params = dna::setup(16, rng);
        dna_key = dna::keygen(dna_params);
        std::string text(32 * 1024, ' ');
        for (auto& c : text) {
            c = codec::kAlphabet[rng.uniform(0, codec::kAlphabetSize - 1)];
        }
        digits = codec::c2i_encode(text);
        chunks = m2fe::kernels::split_chunks(digits, 300);
        const std::size_t width = rsa::decimal_width(params.n);
        cipher = m2fe::kernels::encrypt_chunks(chunks, keys.e, params.n, width, Exec::serial);
        for (const auto& c : chunks) {
            widths.push_back(c.size());
        }
        bits = m2fe::kernels::digits_to_bits(digits, Exec::serial);
        bases = dna::encode(bits, dna_key, dna::rule(5), Exec::serial);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_EncryptChunks(benchmark::State& state) {
    const auto& f = fixture();
    const std::size_t width = rsa::decimal_width(f.params.n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(m2fe::kernels::encrypt_chunks(f.chunks, f.keys.e, f.params.n, width, exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.digits.size()));
}

void BM_DecryptChunks(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            m2fe::kernels::decrypt_chunks(f.cipher, f.keys.d, f.params.n, f.widths, exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.digits.size()));
}

void BM_DigitsToBits(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(m2fe::kernels::digits_to_bits(f.digits, exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.digits.size()));
}

void BM_BitsToDigits(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(m2fe::kernels::bits_to_digits(f.bits, exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.bits.size() / 8));
}

void BM_DnaEncode(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(dna::encode(f.bits, f.dna_key, dna::rule(5), exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.bits.size() / 8));
}

void BM_DnaDecode(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(dna::decode(f.bases, f.dna_key, dna::rule(5), exec_of(state)));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.bases.size() / 4));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_EncryptChunks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DecryptChunks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DigitsToBits)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BitsToDigits)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DnaEncode)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DnaDecode)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
