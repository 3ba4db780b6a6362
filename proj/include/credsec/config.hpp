#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "credsec/authority.hpp"
#include "credsec/cms.hpp"

namespace credsec {

/// Settings shared by the CTA and CMS servers and the command-line clients.
///
/// JSON file keys (all optional):
///   data_dir, host, cta_port, cms_port, cta_endpoint, cms_endpoint,
///   link_secret, lambda, dna_bits, exponent ("65537" | "random"),
///   password {"N", "r", "p"}, session_ttl_seconds
///
/// Environment overrides: CREDSEC_DATA_DIR, CREDSEC_CTA_PORT,
/// CREDSEC_CMS_PORT, CREDSEC_CTA_ENDPOINT, CREDSEC_CMS_ENDPOINT,
/// CREDSEC_LINK_SECRET.
struct ServiceConfig {
    std::filesystem::path data_dir = "credsec-data";
    std::string host = "127.0.0.1";
    std::uint16_t cta_port = 8441;
    std::uint16_t cms_port = 8442;
    std::string cta_endpoint;  // defaults to http://host:cta_port
    std::string cms_endpoint;
    std::string link_secret;  // shared by CTA and CMS for their internal calls
    authority::Config cta;
    cms::Config cms;
};

/// Throws Error{bad_request} for unreadable or ill-typed files.
ServiceConfig load_config(const std::optional<std::filesystem::path>& file);

/// The configured secret, or one kept in <data_dir>/link.secret (created on
/// first use) so that a CTA and a CMS sharing a data directory agree.
std::string resolve_link_secret(const ServiceConfig& config, RandomSource& rng);

}  // namespace credsec
