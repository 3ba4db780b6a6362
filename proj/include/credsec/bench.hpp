#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "credsec/exec.hpp"
#include "credsec/password.hpp"
#include "credsec/rsa.hpp"

// End-to-end timing harness over a fresh CTA + CMS stack.
namespace credsec::bench {

struct Row {
    std::string phase;
    std::string param;
    double elapsed_ms = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
};

struct Options {
    std::vector<std::size_t> sizes = {50 * 1024, 100 * 1024, 200 * 1024, 300 * 1024, 500 * 1024};
    unsigned instructors = 3;
    unsigned students = 5;
    unsigned lambda = rsa::kDefaultLambda;
    rsa::ExponentMode exponent_mode = rsa::ExponentMode::fixed_65537;
    password::Cost password_cost;
    Exec exec = Exec::parallel;
    bool parallel_uploads = false;
    bool over_http = false;  // run the protocol phases through in-process HTTP servers
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> work_dir;  // default: a temp dir removed afterwards
};

/// Phases, one row per entity or size:
///   registration (param ins:<id> / std:<roll>), key_distribution (<roll>),
///   encrypt, upload, retrieval, retrieval_with_recovery, decrypt, size_ratio
///   (param = credential bytes). size_ratio times serialization plus hashing;
///   its ratio is bytes_out / bytes_in.
std::vector<Row> run(const Options& options, std::ostream* progress = nullptr);

/// Header "phase,param,elapsed_ms,bytes_in,bytes_out" then one line per row.
void write_csv(std::ostream& out, const std::vector<Row>& rows);

}  // namespace credsec::bench
