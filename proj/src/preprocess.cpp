#include "nftledger/preprocess.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "nftledger/csv.hpp"
#include "nftledger/errors.hpp"

namespace nftledger {

std::string_view to_string(FlagKind kind) {
    switch (kind) {
        case FlagKind::Clean: return "Clean";
        case FlagKind::LateralSwapSuspect: return "LateralSwapSuspect";
        case FlagKind::WashSuspect: return "WashSuspect";
    }
    return "Clean";
}

std::optional<FlagKind> flag_kind_from_string(std::string_view text) {
    if (text == "Clean") return FlagKind::Clean;
    if (text == "LateralSwapSuspect") return FlagKind::LateralSwapSuspect;
    if (text == "WashSuspect") return FlagKind::WashSuspect;
    return std::nullopt;
}

void SwapFilterConfig::validate() const {
    if (!(swap_price_native > 0))
        throw ContractError("swap_price_native must be positive");
    if (!(relative_tolerance >= 0) || relative_tolerance > 1e-3)
        throw ContractError("relative_tolerance must be in [0, 1e-3]");
}

std::vector<TransactionFlag> flag_lateral_swaps(std::span<const TransactionRecord> records,
                                                const CollectionManifest& manifest,
                                                const SwapFilterConfig& config) {
    config.validate();
    const bool chain_applies = config.applicable_chains.count(manifest.chain) > 0;
    const double band = config.relative_tolerance * config.swap_price_native;

    char reason[96];
    std::snprintf(reason, sizeof reason, "price_native matches swap execution price %g",
                  config.swap_price_native);

    std::vector<TransactionFlag> flags;
    flags.reserve(records.size());
    for (const auto& rec : records) {
        bool hit = chain_applies &&
                   std::fabs(rec.price_native - config.swap_price_native) <= band;
        flags.push_back({rec.tx_hash, rec.token_id,
                         hit ? FlagKind::LateralSwapSuspect : FlagKind::Clean,
                         hit ? reason : ""});
    }
    return flags;
}

std::vector<TransactionRecord> apply_filter(std::span<const TransactionRecord> records,
                                            std::span<const TransactionFlag> flags,
                                            const std::set<FlagKind>& drop) {
    std::unordered_map<std::string, FlagKind> by_key;
    by_key.reserve(flags.size());
    for (const auto& fl : flags)
        by_key.emplace(fl.tx_hash + '\x1f' + fl.token_id, fl.flag);

    std::vector<TransactionRecord> kept;
    kept.reserve(records.size());
    for (const auto& rec : records) {
        auto it = by_key.find(rec.tx_hash + '\x1f' + rec.token_id);
        if (it == by_key.end())
            throw ContractError("no flag for tx_hash " + rec.tx_hash + " token " +
                                rec.token_id);
        if (!drop.count(it->second)) kept.push_back(rec);
    }
    return kept;
}

void write_flags_csv(std::ostream& out, std::span<const TransactionFlag> flags) {
    static const std::vector<std::string> header = {"tx_hash", "token_id", "flag",
                                                    "reason"};
    write_csv_row(out, header);
    for (const auto& fl : flags) {
        std::vector<std::string> fields = {fl.tx_hash, fl.token_id,
                                           std::string(to_string(fl.flag)), fl.reason};
        write_csv_row(out, fields);
    }
}

std::vector<TransactionFlag> read_flags_csv(std::istream& in) {
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields != std::vector<std::string>{"tx_hash", "token_id",
                                                              "flag", "reason"})
        throw ParseError("flag CSV header mismatch");
    std::vector<TransactionFlag> flags;
    while (auto row = reader.next()) {
        if (row->fields.size() != 4) throw ParseError("flag CSV: wrong field count");
        auto kind = flag_kind_from_string(row->fields[2]);
        if (!kind) throw ParseError("flag CSV: unknown flag kind " + row->fields[2]);
        flags.push_back({row->fields[0], row->fields[1], *kind, row->fields[3]});
    }
    return flags;
}

}  // namespace nftledger
