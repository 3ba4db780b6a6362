#include "credsec/config.hpp"

#include <cstdlib>
#include <json.hpp>

#include "credsec/error.hpp"
#include "credsec/fsio.hpp"

namespace credsec {

namespace {

using nlohmann::json;

std::uint16_t port_from(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(text, &used);
        if (used == text.size() && v <= 65535) {
            return static_cast<std::uint16_t>(v);
        }
    } catch (const std::exception&) {
    }
    throw Error(Errc::bad_request, std::string(what) + " is not a port: " + text);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') {
        return std::nullopt;
    }
    return std::string(v);
}

void apply_json(ServiceConfig& c, const json& j) {
    if (!j.is_object()) {
        throw Error(Errc::bad_request, "config must be a JSON object");
    }
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("host")) c.host = j.at("host").get<std::string>();
    if (j.contains("cta_port")) c.cta_port = j.at("cta_port").get<std::uint16_t>();
    if (j.contains("cms_port")) c.cms_port = j.at("cms_port").get<std::uint16_t>();
    if (j.contains("cta_endpoint")) c.cta_endpoint = j.at("cta_endpoint").get<std::string>();
    if (j.contains("cms_endpoint")) c.cms_endpoint = j.at("cms_endpoint").get<std::string>();
    if (j.contains("link_secret")) c.link_secret = j.at("link_secret").get<std::string>();
    if (j.contains("lambda")) c.cta.lambda = j.at("lambda").get<unsigned>();
    if (j.contains("dna_bits")) c.cta.dna_bits = j.at("dna_bits").get<unsigned>();
    if (j.contains("exponent")) {
        const auto mode = j.at("exponent").get<std::string>();
        if (mode == "65537") {
            c.cta.exponent_mode = rsa::ExponentMode::fixed_65537;
        } else if (mode == "random") {
            c.cta.exponent_mode = rsa::ExponentMode::random_full;
        } else {
            throw Error(Errc::bad_request, "exponent must be \"65537\" or \"random\"");
        }
    }
    if (j.contains("password")) {
        const auto& pw = j.at("password");
        c.cms.password_cost.n = pw.value("N", c.cms.password_cost.n);
        c.cms.password_cost.r = pw.value("r", c.cms.password_cost.r);
        c.cms.password_cost.p = pw.value("p", c.cms.password_cost.p);
    }
    if (j.contains("session_ttl_seconds")) c.cms.session_ttl_seconds = j.at("session_ttl_seconds").get<std::uint64_t>();
}

}  // namespace

ServiceConfig load_config(const std::optional<std::filesystem::path>& file) {
    ServiceConfig c;
    if (file) {
        try {
            const Bytes raw = fsio::read_file(*file);
            apply_json(c, json::parse(raw.begin(), raw.end()));
        } catch (const json::exception& e) {
            throw Error(Errc::bad_request, file->string() + ": " + e.what());
        } catch (const Error& e) {
            throw Error(Errc::bad_request, file->string() + ": " + e.detail());
        }
    }
    if (auto v = env("CREDSEC_DATA_DIR")) c.data_dir = *v;
    if (auto v = env("CREDSEC_CTA_PORT")) c.cta_port = port_from(*v, "CREDSEC_CTA_PORT");
    if (auto v = env("CREDSEC_CMS_PORT")) c.cms_port = port_from(*v, "CREDSEC_CMS_PORT");
    if (auto v = env("CREDSEC_CTA_ENDPOINT")) c.cta_endpoint = *v;
    if (auto v = env("CREDSEC_CMS_ENDPOINT")) c.cms_endpoint = *v;
    if (auto v = env("CREDSEC_LINK_SECRET")) c.link_secret = *v;
    if (c.cta_endpoint.empty()) c.cta_endpoint = "http://" + c.host + ":" + std::to_string(c.cta_port);
    if (c.cms_endpoint.empty()) c.cms_endpoint = "http://" + c.host + ":" + std::to_string(c.cms_port);
    return c;
}

std::string resolve_link_secret(const ServiceConfig& config, RandomSource& rng) {
    if (!config.link_secret.empty()) {
        return config.link_secret;
    }
    const auto path = config.data_dir / "link.secret";
    if (!std::filesystem::exists(path)) {
        // Publish with a hard link so that two servers starting together end
        // up reading the same secret.
        std::filesystem::create_directories(config.data_dir);
        const auto temp = config.data_dir / ("link.secret." + rng.hex_token(8));
        fsio::atomic_write(temp, rng.hex_token(32));
        std::filesystem::permissions(temp, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
        std::error_code ec;
        std::filesystem::create_hard_link(temp, path, ec);
        std::filesystem::remove(temp);
    }
    const Bytes raw = fsio::read_file(path);
    return std::string(raw.begin(), raw.end());
}

}  // namespace credsec
