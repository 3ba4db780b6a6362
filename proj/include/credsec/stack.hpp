#pragma once

#include <filesystem>
#include <memory>

#include "credsec/authority.hpp"
#include "credsec/cms.hpp"
#include "credsec/lds.hpp"
#include "credsec/ledger.hpp"

namespace credsec {

/// CTA, CMS, local store and ledger wired together in one process, with data
/// under a single directory (lds/, ledger/, cta.json, cms.json).
struct LocalStack {
    LocalStack(const std::filesystem::path& data_dir, authority::Config cta_config, cms::Config cms_config,
               RandomSource& rng);

    std::filesystem::path data_dir;
    lds::LocalStore store;
    ledger::Ledger chain;
    authority::CertificationAuthority cta;
    cms::LocalAuthorityLink link;
    cms::CredentialService cms;
};

}  // namespace credsec
