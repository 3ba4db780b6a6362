#include "credsec/stack.hpp"

namespace credsec {

LocalStack::LocalStack(const std::filesystem::path& dir, authority::Config cta_config, cms::Config cms_config,
                       RandomSource& rng)
    : data_dir(dir),
      store(dir / "lds"),
      chain(dir / "ledger"),
      cta(cta_config, rng, nullptr, dir / "cta.json"),
      link(cta),
      cms(cms_config, store, chain, link, rng, dir / "cms.json") {
    cta.set_sink(&cms);
}

}  // namespace credsec
