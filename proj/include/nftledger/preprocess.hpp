#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nftledger/core_model.hpp"

namespace nftledger {

enum class FlagKind { Clean, LateralSwapSuspect, WashSuspect };

std::string_view to_string(FlagKind kind);
std::optional<FlagKind> flag_kind_from_string(std::string_view text);

/// Classification of one (tx_hash, token_id) pair by one analysis pass.
struct TransactionFlag {
    std::string tx_hash;
    std::string token_id;
    FlagKind flag = FlagKind::Clean;
    std::string reason;
};

/// Lateral swaps surface as transfers recorded at the swap contract's
/// execution price instead of fair value.
struct SwapFilterConfig {
    double swap_price_native = 0.005;
    double relative_tolerance = 1e-9;
    std::set<Chain> applicable_chains = {Chain::Ethereum};

    /// Throws ContractError when a field is out of range.
    void validate() const;
};

/// Flags a record LateralSwapSuspect iff the collection's chain is in
/// applicable_chains and |price_native - swap_price| <= tolerance * swap_price.
/// Pure classification; emits exactly one flag per record, in record order.
std::vector<TransactionFlag> flag_lateral_swaps(std::span<const TransactionRecord> records,
                                                const CollectionManifest& manifest,
                                                const SwapFilterConfig& config);

/// Keeps exactly the records whose flag kind is not in `drop`, preserving
/// order. Throws ContractError when a record has no covering flag.
std::vector<TransactionRecord> apply_filter(std::span<const TransactionRecord> records,
                                            std::span<const TransactionFlag> flags,
                                            const std::set<FlagKind>& drop);

/// Flag CSV: tx_hash,token_id,flag,reason
void write_flags_csv(std::ostream& out, std::span<const TransactionFlag> flags);
std::vector<TransactionFlag> read_flags_csv(std::istream& in);

}  // namespace nftledger
