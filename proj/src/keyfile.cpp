#include "credsec/keyfile.hpp"

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"
#include "credsec/rsa.hpp"

namespace credsec {

KeyBundle KeyBundle::student_view() const {
    KeyBundle out = *this;
    out.p.reset();
    out.q.reset();
    return out;
}

KeyBundle KeyBundle::instructor_view() const {
    KeyBundle out = student_view();
    out.d.reset();
    return out;
}

const mpz_class& KeyBundle::private_exponent() const {
    if (!d) {
        throw Error(Errc::bad_request, "key bundle has no private exponent");
    }
    return *d;
}

nlohmann::json to_json(const KeyBundle& b) {
    nlohmann::json j;
    j["roll"] = b.roll;
    if (b.p) j["p"] = b.p->get_str(10);
    if (b.q) j["q"] = b.q->get_str(10);
    j["N"] = b.n.get_str(10);
    j["e"] = b.e.get_str(10);
    if (b.d) j["d"] = b.d->get_str(10);
    j["DK"] = b.dna.key.bits;
    j["rule"] = b.dna.rule;
    j["S"] = b.dna.params.s;
    j["T"] = b.dna.params.t;
    return j;
}

KeyBundle key_bundle_from_json(const nlohmann::json& j) {
    try {
        KeyBundle b;
        b.roll = j.value("roll", "");
        b.n = rsa::from_decimal(j.at("N").get<std::string>());
        b.e = rsa::from_decimal(j.at("e").get<std::string>());
        if (j.contains("d")) b.d = rsa::from_decimal(j.at("d").get<std::string>());
        if (j.contains("p")) b.p = rsa::from_decimal(j.at("p").get<std::string>());
        if (j.contains("q")) b.q = rsa::from_decimal(j.at("q").get<std::string>());
        b.dna.params.s = j.at("S").get<std::uint64_t>();
        b.dna.params.t = j.at("T").get<std::uint64_t>();
        b.dna.rule = j.at("rule").get<int>();
        dna::rule(b.dna.rule);
        b.dna.key = dna::keygen(b.dna.params);
        if (j.contains("DK") && j.at("DK").get<std::string>() != b.dna.key.bits) {
            throw Error(Errc::bad_request, "DK does not match S and T");
        }
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::bad_request, std::string("malformed key bundle: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == Errc::bad_request) throw;
        throw Error(Errc::bad_request, std::string("invalid key bundle: ") + e.detail());
    }
}

void save_key_file(const std::filesystem::path& path, const KeyBundle& bundle) {
    fsio::atomic_write(path, to_json(bundle).dump(2) + "\n");
}

KeyBundle load_key_file(const std::filesystem::path& path) {
    const Bytes raw = fsio::read_file(path);
    const auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (j.is_discarded()) {
        throw Error(Errc::bad_request, "key file " + path.string() + " is not valid JSON");
    }
    return key_bundle_from_json(j);
}

}  // namespace credsec
