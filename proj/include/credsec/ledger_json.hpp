#pragma once

#include <json.hpp>

#include "credsec/ledger.hpp"

namespace credsec::ledger {

/// Audit view of a block. Envelopes are summarized by size and digest; pass
/// `with_envelopes` to include them base64-encoded.
nlohmann::json to_json(const Block& block, bool with_envelopes = false);

/// {"blocks": [...], "verify": {"ok", "first_bad_index", "reason"}}
nlohmann::json dump(const Ledger& chain, bool with_envelopes = false);

}  // namespace credsec::ledger
