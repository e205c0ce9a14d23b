#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nftledger/core_model.hpp"

namespace nftledger {

/// Per (trait_type, trait_value) counts over a collection. Fractions use the
/// manifest token count as denominator, so partial trait coverage shows up as
/// fractions summing below 1 (and as a warning) rather than being hidden.
struct TraitFrequencyTable {
    std::int64_t token_count = 0;
    std::size_t covered_tokens = 0;
    std::map<std::string, std::map<std::string, std::int64_t>> counts;
    std::vector<std::string> warnings;

    /// count / token_count. Throws ContractError for an unknown pair.
    double fraction(const std::string& trait_type, const std::string& trait_value) const;
};

TraitFrequencyTable trait_frequencies(const std::map<std::string, TokenTraitSet>& trait_sets,
                                      const CollectionManifest& manifest);

/// Arithmetic mean of a token's per-trait fractions; lower means rarer.
struct RarityScore {
    std::string token_id;
    double score = 0.0;
};

/// Throws ContractError for a token absent from trait_sets.
RarityScore rarity_score(const std::string& token_id,
                         const std::map<std::string, TokenTraitSet>& trait_sets,
                         const TraitFrequencyTable& table);

/// Mean of the chosen price field over the token's records.
/// Throws NoSalesError when the token has no transactions.
double average_token_price(std::span<const TransactionRecord> records,
                           const std::string& token_id, PriceField field);

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares of price on rarity score over (score, avg price)
/// pairs. Requires n >= 3; throws DegenerateInputError when the predictor has
/// zero variance ("undefined slope"). r_squared = 1 - SSE/SST, with the
/// SST = 0 case defined as 0.
RegressionResult price_rarity_regression(std::span<const std::pair<double, double>> pairs);

/// One row of the rarity report: score plus sale statistics.
struct RarityReportRow {
    std::string token_id;
    double score = 0.0;
    std::optional<double> avg_price;  // empty when the token never sold
    std::int64_t n_sales = 0;
};

/// Scores every token in trait_sets and attaches average price / sale count
/// computed over `records` (callers pass swap-filtered records). Rows are
/// ordered by token id.
std::vector<RarityReportRow> build_rarity_report(
    const std::map<std::string, TokenTraitSet>& trait_sets,
    const TraitFrequencyTable& table, std::span<const TransactionRecord> records,
    PriceField field);

}  // namespace nftledger
