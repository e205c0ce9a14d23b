#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nftledger/timeutil.hpp"

namespace nftledger {

enum class Chain { Ethereum, Solana };
enum class Currency { ETH, SOL };
enum class PriceField { Native, Usd };

std::string_view to_string(Chain chain);
std::string_view to_string(Currency currency);
std::string_view to_string(PriceField field);
std::optional<Chain> chain_from_string(std::string_view text);
std::optional<Currency> currency_from_string(std::string_view text);
std::optional<PriceField> price_field_from_string(std::string_view text);

/// Collection identity as declared by the dataset.
struct CollectionManifest {
    std::string slug;
    std::string name;
    Chain chain = Chain::Ethereum;
    Currency native_currency = Currency::ETH;
    DayNumber launch_day = 0;
    std::int64_t token_count = 0;
};

/// One decoded token sale/transfer.
struct TransactionRecord {
    std::string collection;
    std::string token_id;
    std::string tx_hash;
    UnixSeconds timestamp = 0;
    double price_native = 0.0;
    double price_usd = 0.0;
    std::string from_wallet;
    std::string to_wallet;
    std::string marketplace;

    double price(PriceField field) const {
        return field == PriceField::Native ? price_native : price_usd;
    }

    bool operator==(const TransactionRecord&) const = default;
};

/// Trait map of one token; absent trait types carry the explicit value "None".
struct TokenTraitSet {
    std::string token_id;
    std::map<std::string, std::string> traits;  // trait_type -> trait_value

    bool operator==(const TokenTraitSet&) const = default;
};

struct ValidationIssue {
    std::size_t line = 0;
    std::string reason;
};

struct ValidationReport {
    std::size_t record_count = 0;
    std::vector<ValidationIssue> error_entries;
    std::vector<ValidationIssue> warning_entries;

    bool accepted() const { return error_entries.empty(); }
};

/// Reads a flat key/value JSON manifest. Throws ParseError on malformed
/// documents, unknown chain/currency, or non-positive token count.
CollectionManifest parse_manifest(std::istream& in);

struct TransactionParseResult {
    std::vector<TransactionRecord> records;  // sorted by (timestamp, tx_hash, token_id)
    ValidationReport report;
    std::size_t duplicates_collapsed = 0;
};

/// Parses the transactions CSV. Rows failing record invariants are reported
/// as errors and excluded; duplicate (tx_hash, token_id) rows collapse to the
/// first occurrence with a warning. Throws ParseError only on an unreadable
/// stream or a header mismatch.
TransactionParseResult parse_transactions(std::istream& in,
                                          const CollectionManifest& manifest);

struct TraitParseResult {
    std::map<std::string, TokenTraitSet> tokens;  // token_id -> completed trait set
    ValidationReport report;
};

/// Parses the long-format traits CSV and completes every token against the
/// union of observed trait types, filling gaps with "None". Conflicting
/// duplicate (token_id, trait_type) rows are errors; identical duplicates
/// collapse with a warning.
TraitParseResult parse_traits(std::istream& in, const CollectionManifest& manifest);

/// Serializes records back to the transactions CSV format with round-trip
/// precision. parse_transactions of this output reproduces the records.
void write_transactions_csv(std::ostream& out,
                            std::span<const TransactionRecord> records,
                            const CollectionManifest& manifest);

/// Orders identifier strings numerically when both are pure digits,
/// lexicographically otherwise. Used for stable report ordering.
bool natural_less(std::string_view a, std::string_view b);

}  // namespace nftledger
