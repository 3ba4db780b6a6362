#include "credsec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <thread>

#include "credsec/codec.hpp"
#include "credsec/error.hpp"
#include "credsec/http_api.hpp"
#include "credsec/stack.hpp"

namespace credsec::bench {

namespace {

namespace fs = std::filesystem;

template <class F>
double time_ms(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return std::max(ms, 1e-6);
}

// The protocol steps the bench drives, either straight into the library or
// through the HTTP clients.
class Driver {
public:
    virtual ~Driver() = default;
    virtual std::string enroll_instructor(const std::string& email, const std::string& id) = 0;
    virtual int register_instructor(const std::string& email, const std::string& pw, const std::string& id,
                                    const std::string& nonce) = 0;
    virtual KeyBundle enroll_student(const std::string& email, const std::string& roll) = 0;
    virtual int register_student(const std::string& email, const std::string& pw, const std::string& roll) = 0;
    virtual KeyBundle instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) = 0;
    virtual std::string login_instructor(const std::string& email, const std::string& pw,
                                         const std::string& nonce) = 0;
    virtual std::string login_student(const std::string& email, const std::string& pw) = 0;
    virtual void upload(const std::string& token, const std::string& roll, const std::string& course,
                        const m2fe::Sealed& sealed) = 0;
    virtual cms::Retrieved retrieve(const std::string& token, const std::string& roll, const std::string& course) = 0;
    virtual Bytes recover(const std::string& token, const std::string& roll, const std::string& course) = 0;
};

class LocalDriver final : public Driver {
public:
    explicit LocalDriver(LocalStack& s) : s_(s) {}
    std::string enroll_instructor(const std::string& email, const std::string& id) override {
        return s_.cta.register_instructor(email, id).value;
    }
    int register_instructor(const std::string& email, const std::string& pw, const std::string& id,
                            const std::string& nonce) override {
        return s_.cms.register_instructor(email, pw, id, nonce).b;
    }
    KeyBundle enroll_student(const std::string& email, const std::string& roll) override {
        return s_.cta.register_student(email, roll);
    }
    int register_student(const std::string& email, const std::string& pw, const std::string& roll) override {
        return s_.cms.register_student(email, pw, roll).b;
    }
    KeyBundle instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) override {
        return s_.cta.instructor_keys(id, nonce, roll);
    }
    std::string login_instructor(const std::string& email, const std::string& pw, const std::string& nonce) override {
        return s_.cms.login_instructor(email, pw, nonce).token;
    }
    std::string login_student(const std::string& email, const std::string& pw) override {
        return s_.cms.login_student(email, pw).token;
    }
    void upload(const std::string& token, const std::string& roll, const std::string& course,
                const m2fe::Sealed& sealed) override {
        s_.cms.upload(token, roll, course, sealed.bytes, sealed.hash);
    }
    cms::Retrieved retrieve(const std::string& token, const std::string& roll, const std::string& course) override {
        return s_.cms.retrieve(token, roll, course);
    }
    Bytes recover(const std::string& token, const std::string& roll, const std::string& course) override {
        return s_.cms.recover(token, roll, course);
    }

private:
    LocalStack& s_;
};

class HttpDriver final : public Driver {
public:
    HttpDriver(const std::string& cta, const std::string& cms) : cta_(cta), cms_(cms) {}
    std::string enroll_instructor(const std::string& email, const std::string& id) override {
        return cta_.register_instructor(email, id);
    }
    int register_instructor(const std::string& email, const std::string& pw, const std::string& id,
                            const std::string& nonce) override {
        return cms_.register_instructor(email, pw, id, nonce).b;
    }
    KeyBundle enroll_student(const std::string& email, const std::string& roll) override {
        return cta_.register_student(email, roll);
    }
    int register_student(const std::string& email, const std::string& pw, const std::string& roll) override {
        return cms_.register_student(email, pw, roll).b;
    }
    KeyBundle instructor_keys(const std::string& id, const std::string& nonce, const std::string& roll) override {
        return cta_.instructor_keys(id, nonce, roll);
    }
    std::string login_instructor(const std::string& email, const std::string& pw, const std::string& nonce) override {
        return cms_.login_instructor(email, pw, nonce);
    }
    std::string login_student(const std::string& email, const std::string& pw) override {
        return cms_.login_student(email, pw);
    }
    void upload(const std::string& token, const std::string& roll, const std::string& course,
                const m2fe::Sealed& sealed) override {
        cms_.upload(token, roll, course, sealed.bytes, sealed.hash);
    }
    cms::Retrieved retrieve(const std::string& token, const std::string& roll, const std::string& course) override {
        return cms_.retrieve(token, roll, course);
    }
    Bytes recover(const std::string& token, const std::string& roll, const std::string& course) override {
        return cms_.recover(token, roll, course);
    }

private:
    http::CtaClient cta_;
    http::CmsClient cms_;
};

struct Instructor {
    std::string email, id, nonce, token;
};

struct Student {
    std::string email, roll, token;
    KeyBundle keys;
};

void expect(bool ok, const std::string& what) {
    if (!ok) {
        throw Error(Errc::integrity, "bench check failed: " + what);
    }
}

std::string random_text(RandomSource& rng, std::size_t size) {
    const std::string_view alphabet = codec::kAlphabet;
    std::string s(size, ' ');
    for (auto& c : s) {
        c = alphabet[rng.uniform(0, alphabet.size() - 1)];
    }
    return s;
}

}  // namespace

std::vector<Row> run(const Options& opt, std::ostream* progress) {
    if (opt.instructors == 0 || opt.students == 0) {
        throw Error(Errc::bad_request, "bench needs at least one instructor and one student");
    }
    const bool temp = !opt.work_dir;
    SystemRandom sys;
    const fs::path dir = temp ? fs::temp_directory_path() / ("credsec-bench-" + sys.hex_token(6)) : *opt.work_dir;
    fs::create_directories(dir);
    auto log = [&](const std::string& line) {
        if (progress != nullptr) {
            *progress << line << std::endl;
        }
    };

    authority::Config cta_config{opt.lambda, dna::kDefaultSecurityBits, opt.exponent_mode};
    cms::Config cms_config;
    cms_config.password_cost = opt.password_cost;

    // Service-side randomness must be thread-safe; only the workload is seeded.
    SeededRandom workload(opt.seed);
    std::vector<Row> rows;

    {
        std::unique_ptr<LocalStack> local;
        std::unique_ptr<authority::CertificationAuthority> cta;
        std::unique_ptr<lds::LocalStore> store;
        std::unique_ptr<ledger::Ledger> chain;
        std::unique_ptr<http::HttpAuthorityLink> link;
        std::unique_ptr<http::HttpStudentSink> sink;
        std::unique_ptr<cms::CredentialService> cms;
        std::unique_ptr<http::Service> cta_service, cms_service;
        std::unique_ptr<Driver> driver;
        fs::path lds_root;

        if (opt.over_http) {
            const std::string secret = sys.hex_token(16);
            cta = std::make_unique<authority::CertificationAuthority>(cta_config, sys);
            cta_service = http::make_cta_service(*cta, secret);
            cta_service->start("127.0.0.1", 0);
            lds_root = dir / "lds";
            store = std::make_unique<lds::LocalStore>(lds_root);
            chain = std::make_unique<ledger::Ledger>(dir / "ledger");
            link = std::make_unique<http::HttpAuthorityLink>(cta_service->endpoint(), secret);
            cms = std::make_unique<cms::CredentialService>(cms_config, *store, *chain, *link, sys);
            cms_service = http::make_cms_service(*cms, secret);
            cms_service->start("127.0.0.1", 0);
            sink = std::make_unique<http::HttpStudentSink>(cms_service->endpoint(), secret);
            cta->set_sink(sink.get());
            driver = std::make_unique<HttpDriver>(cta_service->endpoint(), cms_service->endpoint());
        } else {
            local = std::make_unique<LocalStack>(dir, cta_config, cms_config, sys);
            lds_root = local->store.root();
            driver = std::make_unique<LocalDriver>(*local);
        }

        std::vector<Instructor> ins(opt.instructors);
        for (unsigned i = 0; i < opt.instructors; ++i) {
            auto& in = ins[i];
            in.id = "I" + std::to_string(i + 1);
            in.email = "ins" + std::to_string(i + 1) + "@bench.local";
            const double ms = time_ms([&] {
                in.nonce = driver->enroll_instructor(in.email, in.id);
                expect(driver->register_instructor(in.email, "pw-" + in.id, in.id, in.nonce) == 1, "ins register");
            });
            rows.push_back({"registration", "ins:" + in.id, ms, 0, 0});
            in.token = driver->login_instructor(in.email, "pw-" + in.id, in.nonce);
        }
        log("registered " + std::to_string(opt.instructors) + " instructors");

        std::vector<Student> st(opt.students);
        for (unsigned i = 0; i < opt.students; ++i) {
            auto& s = st[i];
            s.roll = "R" + std::to_string(i + 1);
            s.email = "std" + std::to_string(i + 1) + "@bench.local";
            const double kd = time_ms([&] { s.keys = driver->enroll_student(s.email, s.roll); });
            rows.push_back({"key_distribution", s.roll, kd, 0, to_json(s.keys).dump().size()});
            const double reg =
                time_ms([&] { expect(driver->register_student(s.email, "pw-" + s.roll, s.roll) == 1, "std register"); });
            rows.push_back({"registration", "std:" + s.roll, reg, 0, 0});
            s.token = driver->login_student(s.email, "pw-" + s.roll);
        }
        log("registered " + std::to_string(opt.students) + " students");

        struct Item {
            std::size_t size;
            std::string text;
            std::string course;
            Student* student;
            Instructor* instructor;
            m2fe::Sealed sealed;
            double upload_ms = 0;
        };
        std::vector<Item> items;
        std::map<std::string, KeyBundle> instructor_copy;
        for (std::size_t i = 0; i < opt.sizes.size(); ++i) {
            Item it;
            it.size = opt.sizes[i];
            it.course = "C" + std::to_string(i + 1);
            it.student = &st[i % st.size()];
            it.instructor = &ins[i % ins.size()];
            it.text = random_text(workload, it.size);
            const std::string key = it.instructor->id + "/" + it.student->roll;
            if (!instructor_copy.contains(key)) {
                instructor_copy[key] = driver->instructor_keys(it.instructor->id, it.instructor->nonce, it.student->roll);
            }
            const KeyBundle& kb = instructor_copy[key];
            m2fe::EncryptOptions eo;
            eo.chunk_digits = std::min(m2fe::kDefaultChunkDigits, rsa::decimal_width(kb.n) - 1);
            eo.exec = opt.exec;
            const double enc = time_ms([&] { it.sealed = m2fe::encrypt(it.text, kb.e, kb.n, kb.dna, eo); });
            const std::string param = std::to_string(it.size);
            rows.push_back({"encrypt", param, enc, it.size, it.sealed.bytes.size()});
            const double ser = time_ms([&] {
                const Bytes b = m2fe::serialize(it.sealed.envelope);
                expect(m2fe::CredentialHash::of(b) == it.sealed.hash, "serialization is stable");
            });
            rows.push_back({"size_ratio", param, ser, it.size, it.sealed.bytes.size()});
            items.push_back(std::move(it));
            log("encrypted " + param + " bytes");
        }

        if (opt.parallel_uploads) {
            std::vector<std::thread> threads;
            std::vector<std::exception_ptr> errors(items.size());
            for (std::size_t i = 0; i < items.size(); ++i) {
                threads.emplace_back([&, i] {
                    try {
                        auto& it = items[i];
                        it.upload_ms = time_ms(
                            [&] { driver->upload(it.instructor->token, it.student->roll, it.course, it.sealed); });
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                });
            }
            for (auto& t : threads) {
                t.join();
            }
            for (const auto& e : errors) {
                if (e) {
                    std::rethrow_exception(e);
                }
            }
        } else {
            for (auto& it : items) {
                it.upload_ms =
                    time_ms([&] { driver->upload(it.instructor->token, it.student->roll, it.course, it.sealed); });
            }
        }
        for (const auto& it : items) {
            rows.push_back({"upload", std::to_string(it.size), it.upload_ms, it.sealed.bytes.size(), 0});
        }
        log("uploaded " + std::to_string(items.size()) + " credentials");

        for (const auto& it : items) {
            Bytes got;
            const double ms = time_ms([&] {
                const auto r = driver->retrieve(it.student->token, it.student->roll, it.course);
                expect(m2fe::credential_verify(m2fe::CredentialHash::of(r.envelope), r.hash) == 1, "clean retrieval");
                got = r.envelope;
            });
            rows.push_back({"retrieval", std::to_string(it.size), ms, 0, got.size()});
        }

        for (const auto& it : items) {
            Bytes forged = it.sealed.bytes;
            forged[forged.size() / 2] ^= 0x5a;
            lds::LocalStore(lds_root).overwrite_raw(it.student->roll, it.course, forged);
            Bytes restored;
            const double ms = time_ms([&] {
                const auto r = driver->retrieve(it.student->token, it.student->roll, it.course);
                expect(m2fe::credential_verify(m2fe::CredentialHash::of(r.envelope), r.hash) == 0, "tamper seen");
                restored = driver->recover(it.student->token, it.student->roll, it.course);
                expect(m2fe::credential_verify(m2fe::CredentialHash::of(restored), r.hash) == 1, "recovered");
            });
            rows.push_back({"retrieval_with_recovery", std::to_string(it.size), ms, 0, restored.size()});
        }
        log("retrieval done");

        for (const auto& it : items) {
            const KeyBundle& keys = it.student->keys;
            std::string plain;
            const double ms = time_ms([&] {
                plain = m2fe::decrypt(m2fe::parse(it.sealed.bytes), keys.private_exponent(), keys.n, keys.dna, opt.exec);
            });
            expect(plain == it.text, "decrypt roundtrip");
            rows.push_back({"decrypt", std::to_string(it.size), ms, it.sealed.bytes.size(), plain.size()});
            log("decrypted " + std::to_string(it.size) + " bytes");
        }

        if (cms_service) cms_service->stop();
        if (cta_service) cta_service->stop();
        if (cta) cta->set_sink(nullptr);
    }

    if (temp) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    return rows;
}

void write_csv(std::ostream& out, const std::vector<Row>& rows) {
    out << "phase,param,elapsed_ms,bytes_in,bytes_out\n";
    for (const auto& r : rows) {
        out << r.phase << ',' << r.param << ',' << r.elapsed_ms << ',' << r.bytes_in << ',' << r.bytes_out << '\n';
    }
}

}  // namespace credsec::bench
