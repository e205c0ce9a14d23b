#include "nftledger/rarity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nftledger/errors.hpp"

namespace nftledger {

double TraitFrequencyTable::fraction(const std::string& trait_type,
                                     const std::string& trait_value) const {
    auto type_it = counts.find(trait_type);
    if (type_it == counts.end())
        throw ContractError("unknown trait_type " + trait_type);
    auto value_it = type_it->second.find(trait_value);
    if (value_it == type_it->second.end())
        throw ContractError("unknown trait_value " + trait_value + " for " + trait_type);
    return static_cast<double>(value_it->second) / static_cast<double>(token_count);
}

TraitFrequencyTable trait_frequencies(const std::map<std::string, TokenTraitSet>& trait_sets,
                                      const CollectionManifest& manifest) {
    TraitFrequencyTable table;
    table.token_count = manifest.token_count;
    table.covered_tokens = trait_sets.size();
    for (const auto& [token, set] : trait_sets)
        for (const auto& [type, value] : set.traits)
            ++table.counts[type][value];

    if (table.covered_tokens > static_cast<std::size_t>(manifest.token_count))
        table.warnings.push_back("trait sets reference more tokens than the manifest token count");
    else if (table.covered_tokens < static_cast<std::size_t>(manifest.token_count))
        table.warnings.push_back("trait sets cover fewer tokens than the manifest token count");
    return table;
}

RarityScore rarity_score(const std::string& token_id,
                         const std::map<std::string, TokenTraitSet>& trait_sets,
                         const TraitFrequencyTable& table) {
    auto it = trait_sets.find(token_id);
    if (it == trait_sets.end()) throw ContractError("unknown token " + token_id);
    const auto& traits = it->second.traits;
    if (traits.empty()) throw ContractError("token " + token_id + " has no traits");

    double sum = 0.0;
    for (const auto& [type, value] : traits) sum += table.fraction(type, value);
    return {token_id, sum / static_cast<double>(traits.size())};
}

double average_token_price(std::span<const TransactionRecord> records,
                           const std::string& token_id, PriceField field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& rec : records) {
        if (rec.token_id != token_id) continue;
        sum += rec.price(field);
        ++n;
    }
    if (n == 0) throw NoSalesError("no sales for token " + token_id);
    return sum / static_cast<double>(n);
}

RegressionResult price_rarity_regression(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3)
        throw DegenerateInputError("regression needs at least 3 points");

    // Single pass over centered co-moments (Welford style).
    double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    std::size_t n = 0;
    for (const auto& [x, y] : pairs) {
        ++n;
        double dx = x - mean_x;
        double dy = y - mean_y;
        mean_x += dx / static_cast<double>(n);
        mean_y += dy / static_cast<double>(n);
        sxx += dx * (x - mean_x);
        sxy += dx * (y - mean_y);
        syy += dy * (y - mean_y);
    }
    if (sxx == 0.0) throw DegenerateInputError("undefined slope: predictor has zero variance");

    RegressionResult result;
    result.n = pairs.size();
    result.slope = sxy / sxx;
    result.intercept = mean_y - result.slope * mean_x;
    if (syy == 0.0) {
        result.r_squared = 0.0;  // constant response: no explainable variance
    } else {
        double sse = syy - result.slope * sxy;
        result.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
    }
    return result;
}

std::vector<RarityReportRow> build_rarity_report(
    const std::map<std::string, TokenTraitSet>& trait_sets,
    const TraitFrequencyTable& table, std::span<const TransactionRecord> records,
    PriceField field) {
    std::unordered_map<std::string, std::pair<double, std::int64_t>> sales;
    for (const auto& rec : records) {
        auto& [sum, count] = sales[rec.token_id];
        sum += rec.price(field);
        ++count;
    }

    std::vector<RarityReportRow> rows;
    rows.reserve(trait_sets.size());
    for (const auto& [token, set] : trait_sets) {
        RarityReportRow row;
        row.token_id = token;
        row.score = rarity_score(token, trait_sets, table).score;
        if (auto it = sales.find(token); it != sales.end()) {
            row.n_sales = it->second.second;
            row.avg_price = it->second.first / static_cast<double>(it->second.second);
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const RarityReportRow& a, const RarityReportRow& b) {
        return natural_less(a.token_id, b.token_id);
    });
    return rows;
}

}  // namespace nftledger
