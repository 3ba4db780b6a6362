#include "credsec/ledger_json.hpp"

namespace credsec::ledger {

nlohmann::json to_json(const Block& block, bool with_envelopes) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : block.records) {
        nlohmann::json jr{{"roll", r.roll},
                          {"course", r.course},
                          {"uploaded_by", r.uploaded_by},
                          {"credential_hash", to_hex(r.credential_hash)},
                          {"envelope_bytes", r.envelope.size()}};
        if (with_envelopes) {
            jr["envelope"] = base64_encode(r.envelope);
        }
        records.push_back(std::move(jr));
    }
    return {{"index", block.index},
            {"timestamp", block.timestamp},
            {"prev_hash", to_hex(block.prev_hash)},
            {"block_hash", to_hex(block.block_hash)},
            {"records", records}};
}

nlohmann::json dump(const Ledger& chain, bool with_envelopes) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : chain.blocks()) {
        blocks.push_back(to_json(b, with_envelopes));
    }
    const VerifyResult v = chain.verify();
    nlohmann::json verify{{"ok", v.ok}, {"reason", v.reason}};
    verify["first_bad_index"] = v.first_bad_index ? nlohmann::json(*v.first_bad_index) : nlohmann::json(nullptr);
    return {{"blocks", blocks}, {"verify", verify}};
}

}  // namespace credsec::ledger
