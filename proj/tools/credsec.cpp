// credsec: servers, role clients, benchmark and tamper tool.
//
// Every action prints one JSON object on stdout. Failures print
// {"b": 0, "error": ..., "reason": ...} and exit 2; `std verify` and
// `ledger verify` exit 1 when the check itself fails.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "credsec/bench.hpp"
#include "credsec/codec.hpp"
#include "credsec/config.hpp"
#include "credsec/error.hpp"
#include "credsec/fsio.hpp"
#include "credsec/http_api.hpp"
#include "credsec/keyfile.hpp"
#include "credsec/ledger_json.hpp"
#include "credsec/tamper.hpp"

using namespace credsec;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<fs::path> config;
    std::string endpoint;
    std::optional<fs::path> key_file;
    std::optional<fs::path> out;
};

// Flags shared by the session-using actions.
struct Login {
    std::string email;
    std::string password;
    std::string nonce;
    std::string token;
};

int exit_code = 0;

void print(const json& j) { std::cout << j.dump() << std::endl; }

ServiceConfig config_of(const Globals& g) { return load_config(g.config); }

std::string cta_endpoint(const Globals& g) { return g.endpoint.empty() ? config_of(g).cta_endpoint : g.endpoint; }
std::string cms_endpoint(const Globals& g) { return g.endpoint.empty() ? config_of(g).cms_endpoint : g.endpoint; }

std::string password_of(const Login& l) {
    if (!l.password.empty()) {
        return l.password;
    }
    if (const char* v = std::getenv("CREDSEC_PASSWORD")) {
        return v;
    }
    throw Error(Errc::bad_request, "--password (or CREDSEC_PASSWORD) is required");
}

std::string token_for(const http::CmsClient& cms, const Login& l, bool instructor) {
    if (!l.token.empty()) {
        return l.token;
    }
    if (const char* v = std::getenv("CREDSEC_TOKEN"); v != nullptr && *v != '\0') {
        return v;
    }
    if (l.email.empty()) {
        throw Error(Errc::bad_request, "pass --token or --email/--password to log in");
    }
    return instructor ? cms.login_instructor(l.email, password_of(l), l.nonce) : cms.login_student(l.email, password_of(l));
}

void add_login(CLI::App* cmd, Login& l, bool with_nonce) {
    cmd->add_option("--token", l.token, "session token (or CREDSEC_TOKEN)");
    cmd->add_option("--email", l.email);
    cmd->add_option("--password", l.password, "or CREDSEC_PASSWORD");
    if (with_nonce) {
        cmd->add_option("--nonce", l.nonce);
    }
}

const fs::path& need(const std::optional<fs::path>& p, const char* flag) {
    if (!p) {
        throw Error(Errc::bad_request, std::string(flag) + " is required");
    }
    return *p;
}

Bytes read_bytes(const fs::path& p) { return fsio::read_file(p); }

std::string read_text(const fs::path& p) {
    const Bytes b = fsio::read_file(p);
    return std::string(b.begin(), b.end());
}

void write_bytes(const fs::path& p, const Bytes& b) { fsio::atomic_write(p, b); }

fs::path hash_path(const fs::path& envelope) { return fs::path(envelope.string() + ".hash"); }

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t mult = 1;
        const char suffix = static_cast<char>(std::toupper(static_cast<unsigned char>(item.back())));
        if (suffix == 'K') {
            mult = 1024;
            item.pop_back();
        } else if (suffix == 'M') {
            mult = 1024 * 1024;
            item.pop_back();
        }
        try {
            out.push_back(std::stoull(item) * mult);
        } catch (const std::exception&) {
            throw Error(Errc::bad_request, "bad size \"" + item + "\"");
        }
    }
    return out;
}

// Blocks SIGINT/SIGTERM in every thread, runs the service, and returns when
// one of them arrives.
void serve(http::Service& service, const std::string& host, std::uint16_t port, const char* role) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    service.start(host, port);
    print({{"role", role}, {"endpoint", service.endpoint()}});
    int sig = 0;
    sigwait(&set, &sig);
    service.stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"credsec: credential encryption, storage and recovery"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--endpoint", g.endpoint, "server base URL for this action");
    app.add_option("--key-file", g.key_file, "JSON key bundle");
    app.add_option("--out", g.out, "output file");
    // Allow the global flags after the subcommand as well.
    app.fallthrough();

    std::function<void()> action;

    // c2i-table
    app.add_subcommand("c2i-table", "print the character-to-integer table")->callback([&] {
        action = [&] {
            const std::string table = codec::table_listing();
            if (g.out) {
                fsio::atomic_write(*g.out, table);
                print({{"out", g.out->string()}, {"entries", codec::kAlphabetSize}});
            } else {
                std::cout << table;
            }
        };
    });

    // cta
    auto* cta = app.add_subcommand("cta", "certification authority");
    cta->require_subcommand(1);
    std::optional<std::uint16_t> port;
    cta->add_subcommand("serve", "run the CTA server")->callback([&] {
        action = [&] {
            const auto c = config_of(g);
            SystemRandom rng;
            const std::string secret = resolve_link_secret(c, rng);
            authority::CertificationAuthority authority(c.cta, rng, nullptr, c.data_dir / "cta.json");
            http::HttpStudentSink sink(c.cms_endpoint, secret);
            authority.set_sink(&sink);
            auto service = http::make_cta_service(authority, secret);
            serve(*service, c.host, port.value_or(c.cta_port), "cta");
        };
    })->add_option("--port", port, "listen port (0 picks a free one)");

    std::string kg_roll = "R0";
    unsigned kg_lambda = rsa::kDefaultLambda;
    bool kg_random_e = false;
    auto* keygen = cta->add_subcommand("keygen", "generate a standalone key bundle without a server");
    keygen->add_option("--roll", kg_roll);
    keygen->add_option("--lambda", kg_lambda, "modulus bits");
    keygen->add_flag("--random-e", kg_random_e, "full-size random public exponent");
    keygen->callback([&] {
        action = [&] {
            SystemRandom rng;
            const auto params = rsa::setup(kg_lambda, rng);
            const auto keys =
                rsa::keygen(params, rng, kg_random_e ? rsa::ExponentMode::random_full : rsa::ExponentMode::fixed_65537);
            KeyBundle kb;
            kb.roll = kg_roll;
            kb.n = params.n;
            kb.e = keys.e;
            kb.d = keys.d;
            kb.p = params.p;
            kb.q = params.q;
            kb.dna.params = dna::setup(dna::kDefaultSecurityBits, rng);
            kb.dna.key = dna::keygen(kb.dna.params);
            kb.dna.rule = static_cast<int>(rng.uniform(0, dna::kRuleCount - 1));
            const auto& out = need(g.out, "--out");
            save_key_file(out, kb);
            print({{"roll", kb.roll}, {"out", out.string()}, {"N_bits", mpz_sizeinbase(kb.n.get_mpz_t(), 2)}});
        };
    });

    // cms
    auto* cms = app.add_subcommand("cms", "credential management service");
    cms->require_subcommand(1);
    cms->add_subcommand("serve", "run the CMS server")->callback([&] {
        action = [&] {
            const auto c = config_of(g);
            SystemRandom rng;
            const std::string secret = resolve_link_secret(c, rng);
            lds::LocalStore store(c.data_dir / "lds");
            ledger::Ledger chain(c.data_dir / "ledger");
            http::HttpAuthorityLink link(c.cta_endpoint, secret);
            cms::CredentialService svc(c.cms, store, chain, link, rng, c.data_dir / "cms.json");
            auto service = http::make_cms_service(svc, secret);
            serve(*service, c.host, port.value_or(c.cms_port), "cms");
        };
    })->add_option("--port", port, "listen port (0 picks a free one)");

    // ins
    auto* ins = app.add_subcommand("ins", "instructor actions");
    ins->require_subcommand(1);
    std::string email, id, roll, course, nonce;
    Login login;
    std::optional<fs::path> in;

    auto* ins_enroll = ins->add_subcommand("enroll", "register with the CTA; prints the nonce");
    ins_enroll->add_option("--email", email)->required();
    ins_enroll->add_option("--id", id)->required();
    ins_enroll->callback([&] {
        action = [&] { print({{"nonce", http::CtaClient(cta_endpoint(g)).register_instructor(email, id)}}); };
    });

    auto* ins_register = ins->add_subcommand("register", "register with the CMS");
    ins_register->add_option("--email", login.email)->required();
    ins_register->add_option("--password", login.password);
    ins_register->add_option("--id", id)->required();
    ins_register->add_option("--nonce", login.nonce)->required();
    ins_register->callback([&] {
        action = [&] {
            const auto o =
                http::CmsClient(cms_endpoint(g)).register_instructor(login.email, password_of(login), id, login.nonce);
            print({{"b", o.b}, {"reason", o.reason}});
            exit_code = o.b == 1 ? 0 : 1;
        };
    });

    auto* ins_login = ins->add_subcommand("login", "open a CMS session");
    add_login(ins_login, login, true);
    ins_login->callback([&] {
        action = [&] {
            login.token.clear();
            print({{"b", 1}, {"token", token_for(http::CmsClient(cms_endpoint(g)), login, true)}});
        };
    });

    auto* ins_keys = ins->add_subcommand("keys", "fetch a student's public key bundle from the CTA");
    ins_keys->add_option("--id", id)->required();
    ins_keys->add_option("--nonce", nonce)->required();
    ins_keys->add_option("--roll", roll)->required();
    ins_keys->callback([&] {
        action = [&] {
            const auto kb = http::CtaClient(cta_endpoint(g)).instructor_keys(id, nonce, roll);
            const auto& out = need(g.out, "--out");
            save_key_file(out, kb);
            print({{"roll", kb.roll}, {"out", out.string()}});
        };
    });

    std::string text;
    std::optional<std::size_t> chunk_digits;
    auto* ins_encrypt = ins->add_subcommand("encrypt", "encrypt a credential into an envelope file");
    ins_encrypt->add_option("--in", in, "plaintext file");
    ins_encrypt->add_option("--text", text, "plaintext given inline");
    ins_encrypt->add_option("--chunk-digits", chunk_digits, "k (default 300, capped below N)");
    ins_encrypt->callback([&] {
        action = [&] {
            const auto kb = load_key_file(need(g.key_file, "--key-file"));
            const std::string plain = in ? read_text(*in) : text;
            m2fe::EncryptOptions eo;
            eo.chunk_digits = chunk_digits.value_or(std::min(m2fe::kDefaultChunkDigits, rsa::decimal_width(kb.n) - 1));
            const auto sealed = m2fe::encrypt(plain, kb.e, kb.n, kb.dna, eo);
            const auto& out = need(g.out, "--out");
            write_bytes(out, sealed.bytes);
            print({{"out", out.string()}, {"hash", sealed.hash.hex()}, {"bytes", sealed.bytes.size()}});
        };
    });

    auto* ins_upload = ins->add_subcommand("upload", "upload an envelope file for a student");
    add_login(ins_upload, login, true);
    ins_upload->add_option("--roll", roll)->required();
    ins_upload->add_option("--course", course)->required();
    ins_upload->add_option("--in", in, "envelope file")->required();
    ins_upload->callback([&] {
        action = [&] {
            http::CmsClient client(cms_endpoint(g));
            const Bytes env = read_bytes(*in);
            const auto hash = m2fe::CredentialHash::of(env);
            client.upload(token_for(client, login, true), roll, course, env, hash);
            print({{"b", 1}, {"hash", hash.hex()}});
        };
    });

    // std
    auto* stdc = app.add_subcommand("std", "student actions");
    stdc->require_subcommand(1);

    auto* std_enroll = stdc->add_subcommand("enroll", "register with the CTA and save the key bundle");
    std_enroll->add_option("--email", email)->required();
    std_enroll->add_option("--roll", roll)->required();
    std_enroll->callback([&] {
        action = [&] {
            const auto kb = http::CtaClient(cta_endpoint(g)).register_student(email, roll);
            const auto& out = need(g.out, "--out");
            save_key_file(out, kb);
            print({{"roll", kb.roll}, {"out", out.string()}});
        };
    });

    auto* std_register = stdc->add_subcommand("register", "register with the CMS");
    std_register->add_option("--email", login.email)->required();
    std_register->add_option("--password", login.password);
    std_register->add_option("--roll", roll)->required();
    std_register->callback([&] {
        action = [&] {
            const auto o = http::CmsClient(cms_endpoint(g)).register_student(login.email, password_of(login), roll);
            print({{"b", o.b}, {"reason", o.reason}});
            exit_code = o.b == 1 ? 0 : 1;
        };
    });

    auto* std_login = stdc->add_subcommand("login", "open a CMS session");
    add_login(std_login, login, false);
    std_login->callback([&] {
        action = [&] {
            login.token.clear();
            print({{"b", 1}, {"token", token_for(http::CmsClient(cms_endpoint(g)), login, false)}});
        };
    });

    auto* std_fetch = stdc->add_subcommand("fetch", "download an envelope and its ledger digest");
    add_login(std_fetch, login, false);
    std_fetch->add_option("--roll", roll)->required();
    std_fetch->add_option("--course", course)->required();
    std_fetch->callback([&] {
        action = [&] {
            http::CmsClient client(cms_endpoint(g));
            const auto got = client.retrieve(token_for(client, login, false), roll, course);
            const auto& out = need(g.out, "--out");
            write_bytes(out, got.envelope);
            fsio::atomic_write(hash_path(out), got.hash.hex());
            print({{"out", out.string()}, {"hash", got.hash.hex()}, {"bytes", got.envelope.size()}});
        };
    });

    std::string expected_hash;
    auto* std_verify = stdc->add_subcommand("verify", "compare an envelope with its ledger digest");
    std_verify->add_option("--in", in, "envelope file")->required();
    std_verify->add_option("--hash", expected_hash, "hex digest (default: <in>.hash)");
    std_verify->callback([&] {
        action = [&] {
            const auto computed = m2fe::CredentialHash::of(read_bytes(*in));
            const std::string hex = expected_hash.empty() ? read_text(hash_path(*in)) : expected_hash;
            const int b = m2fe::credential_verify(computed, {digest_from_hex(hex)});
            print({{"b", b}, {"hash", computed.hex()}});
            exit_code = b == 1 ? 0 : 1;
        };
    });

    auto* std_recover = stdc->add_subcommand("recover", "restore the local copy from the ledger");
    add_login(std_recover, login, false);
    std_recover->add_option("--roll", roll)->required();
    std_recover->add_option("--course", course)->required();
    std_recover->callback([&] {
        action = [&] {
            http::CmsClient client(cms_endpoint(g));
            const bool by_token = !login.token.empty() || std::getenv("CREDSEC_TOKEN") != nullptr;
            const Bytes env = by_token ? client.recover(token_for(client, login, false), roll, course)
                                       : client.recover(login.email, password_of(login), roll, course);
            const auto hash = m2fe::CredentialHash::of(env);
            json out{{"b", 1}, {"hash", hash.hex()}, {"bytes", env.size()}};
            if (g.out) {
                write_bytes(*g.out, env);
                fsio::atomic_write(hash_path(*g.out), hash.hex());
                out["out"] = g.out->string();
            }
            print(out);
        };
    });

    auto* std_transcript = stdc->add_subcommand("transcript", "download every course credential into a directory");
    add_login(std_transcript, login, false);
    std_transcript->add_option("--roll", roll)->required();
    std_transcript->callback([&] {
        action = [&] {
            http::CmsClient client(cms_endpoint(g));
            const auto& dir = need(g.out, "--out");
            fs::create_directories(dir);
            json list = json::array();
            for (const auto& c : client.transcript(token_for(client, login, false), roll)) {
                const fs::path file = dir / (c.course + ".cred");
                write_bytes(file, c.envelope);
                fsio::atomic_write(hash_path(file), c.hash.hex());
                list.push_back({{"course", c.course},
                                {"out", file.string()},
                                {"b", m2fe::credential_verify(m2fe::CredentialHash::of(c.envelope), c.hash)}});
            }
            print({{"roll", roll}, {"credentials", list}});
        };
    });

    auto* std_decrypt = stdc->add_subcommand("decrypt", "decrypt an envelope file with the student key");
    std_decrypt->add_option("--in", in, "envelope file")->required();
    std_decrypt->callback([&] {
        action = [&] {
            const auto kb = load_key_file(need(g.key_file, "--key-file"));
            const std::string plain = m2fe::decrypt(m2fe::parse(read_bytes(*in)), kb.private_exponent(), kb.n, kb.dna);
            if (g.out) {
                fsio::atomic_write(*g.out, plain);
                print({{"out", g.out->string()}, {"bytes", plain.size()}});
            } else {
                print({{"text", plain}});
            }
        };
    });

    bool show_bases = false;
    auto* std_inspect = stdc->add_subcommand("inspect", "print an envelope header");
    std_inspect->add_option("--in", in, "envelope file")->required();
    std_inspect->add_flag("--bases", show_bases, "include the payload as ACGT text");
    std_inspect->callback([&] {
        action = [&] {
            const Bytes raw = read_bytes(*in);
            const auto env = m2fe::parse(raw);
            json out{{"version", env.version},
                     {"chunk_digits", env.chunk_digits},
                     {"cipher_width", env.cipher_width},
                     {"digit_count", env.digit_count},
                     {"payload_bits", env.payload_bit_length()},
                     {"hash", m2fe::CredentialHash::of(raw).hex()}};
            if (show_bases) {
                out["bases"] = env.payload;
            }
            print(out);
        };
    });

    // bench
    auto* bench = app.add_subcommand("bench", "time every protocol phase and emit CSV");
    bench::Options bo;
    std::string sizes;
    bool random_e = false, serial = false;
    std::uint64_t cost_n = bo.password_cost.n;
    bench->add_option("--sizes", sizes, "comma-separated credential sizes, e.g. 50K,100K");
    bench->add_option("--instructors", bo.instructors);
    bench->add_option("--students", bo.students);
    bench->add_option("--lambda", bo.lambda, "modulus bits");
    bench->add_option("--seed", bo.seed);
    bench->add_option("--scrypt-n", cost_n, "password hashing cost");
    bench->add_flag("--random-e", random_e, "full-size random public exponent");
    bench->add_flag("--serial", serial, "use the serial kernels");
    bench->add_flag("--parallel-uploads", bo.parallel_uploads);
    bench->add_flag("--http", bo.over_http, "drive the protocol through local HTTP servers");
    bench->callback([&] {
        action = [&] {
            if (!sizes.empty()) {
                bo.sizes = parse_sizes(sizes);
            }
            bo.exponent_mode = random_e ? rsa::ExponentMode::random_full : rsa::ExponentMode::fixed_65537;
            bo.exec = serial ? Exec::serial : Exec::parallel;
            bo.password_cost.n = cost_n;
            const auto rows = bench::run(bo, &std::cerr);
            if (g.out) {
                std::ofstream f(*g.out);
                bench::write_csv(f, rows);
                if (!f) {
                    throw Error(Errc::persistence_failure, "cannot write " + g.out->string());
                }
            } else {
                bench::write_csv(std::cout, rows);
            }
        };
    });

    // tamper
    auto* tamper = app.add_subcommand("tamper", "mutate stored data directly");
    tamper->require_subcommand(1);
    std::vector<std::string> mutations;
    std::optional<fs::path> data_dir;
    std::uint64_t block = 0;
    auto data_root = [&] { return data_dir ? *data_dir : config_of(g).data_dir; };
    auto parsed = [&] {
        std::vector<tamper::Mutation> m;
        for (const auto& s : mutations) {
            m.push_back(tamper::parse_mutation(s));
        }
        return m;
    };
    auto* t_lds = tamper->add_subcommand("lds", "flip bits or bytes of a stored envelope");
    t_lds->add_option("--data-dir", data_dir);
    t_lds->add_option("--roll", roll)->required();
    t_lds->add_option("--course", course)->required();
    t_lds->add_option("--mutation", mutations, "bit:<i> | byte:<i>[:<mask>], repeatable");
    t_lds->callback([&] {
        action = [&] {
            const auto m = parsed();
            tamper::lds(data_root() / "lds", roll, course, m);
            print({{"target", "lds"}, {"roll", roll}, {"course", course}, {"applied", m.size()}});
        };
    });
    auto* t_ledger = tamper->add_subcommand("ledger", "flip bits or bytes of a ledger block");
    t_ledger->add_option("--data-dir", data_dir);
    t_ledger->add_option("--block", block)->required();
    t_ledger->add_option("--mutation", mutations, "bit:<i> | byte:<i>[:<mask>], repeatable");
    t_ledger->callback([&] {
        action = [&] {
            const auto m = parsed();
            tamper::ledger(data_root() / "ledger", block, m);
            print({{"target", "ledger"}, {"block", block}, {"applied", m.size()}});
        };
    });

    // ledger
    auto* led = app.add_subcommand("ledger", "inspect the chain");
    led->require_subcommand(1);
    bool with_envelopes = false;
    auto* l_dump = led->add_subcommand("dump", "print the chain as JSON");
    l_dump->add_option("--data-dir", data_dir);
    l_dump->add_flag("--envelopes", with_envelopes, "include envelopes (base64)");
    l_dump->callback([&] {
        action = [&] {
            const ledger::Ledger chain(data_root() / "ledger");
            const json j = ledger::dump(chain, with_envelopes);
            if (g.out) {
                fsio::atomic_write(*g.out, j.dump(2));
                print({{"out", g.out->string()}, {"blocks", j["blocks"].size()}});
            } else {
                std::cout << j.dump(2) << std::endl;
            }
        };
    });
    auto* l_verify = led->add_subcommand("verify", "check every block hash and link");
    l_verify->add_option("--data-dir", data_dir);
    l_verify->callback([&] {
        action = [&] {
            const ledger::Ledger chain(data_root() / "ledger");
            const auto v = chain.verify();
            json out{{"ok", v.ok}, {"blocks", chain.size()}, {"reason", v.reason}};
            out["first_bad_index"] = v.first_bad_index ? json(*v.first_bad_index) : json(nullptr);
            print(out);
            exit_code = v.ok ? 0 : 1;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        action();
    } catch (const Error& e) {
        json err{{"b", 0}, {"error", std::string(to_string(e.code()))}, {"reason", e.detail()}};
        if (const auto* ie = dynamic_cast<const IntegrityError*>(&e)) {
            err["cause"] = std::string(to_string(ie->cause()));
        }
        print(err);
        return 2;
    } catch (const std::exception& e) {
        print({{"b", 0}, {"error", "Internal"}, {"reason", e.what()}});
        return 2;
    }
    return exit_code;
}
