#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nftledger/core_model.hpp"
#include "nftledger/preprocess.hpp"

namespace nftledger {

/// One directed wallet-to-wallet transfer edge.
struct TradeEdge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::string token_id;
    UnixSeconds timestamp = 0;
    double price_native = 0.0;
    std::string tx_hash;
    std::size_t record_index = 0;  // index into the records the graph was built from
};

/// Directed multigraph of wallets. Immutable once built; wallet indices are
/// assigned in lexicographic wallet order, so index order is address order.
class TradeGraph {
public:
    static TradeGraph build(std::span<const TransactionRecord> records);
    static TradeGraph build(std::span<const TransactionRecord> records,
                            std::span<const std::size_t> subset);

    std::size_t node_count() const { return wallets_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& wallets() const { return wallets_; }
    const std::vector<TradeEdge>& edges() const { return edges_; }
    /// Outgoing edge ids per node.
    const std::vector<std::vector<std::size_t>>& adjacency() const { return out_; }

private:
    std::vector<std::string> wallets_;
    std::vector<TradeEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
};

enum class WashScope { PerToken, PerCollection };

std::string_view to_string(WashScope scope);
std::optional<WashScope> wash_scope_from_string(std::string_view text);

inline constexpr std::size_t kUnlimitedLength = std::numeric_limits<std::size_t>::max();

/// Elementary circuit in canonical form: nodes are distinct, stored in open
/// form with nodes[0] the lexicographically smallest wallet; hop_edges[i]
/// lists every parallel edge supporting the hop nodes[i] -> nodes[(i+1)%k].
struct Circuit {
    std::vector<std::uint32_t> nodes;
    std::vector<std::vector<std::size_t>> hop_edges;

    std::size_t length() const { return nodes.size(); }
};

/// Builds a graph for the given scope; per-token scope requires a nonempty
/// record set.
TradeGraph build_graph(std::span<const TransactionRecord> records,
                       WashScope scope = WashScope::PerCollection);

/// Enumerates every elementary circuit of length <= max_length exactly once,
/// canonicalized. Uniqueness is by node sequence: parallel edges do not
/// multiply circuits (they land in hop_edges instead). Self-loop edges are
/// never part of a circuit. Unlimited length runs Johnson's blocked-search
/// enumeration; a finite bound runs a length-pruned backtracking search.
/// Throws BudgetExceededError once more than circuit_budget circuits exist.
std::vector<Circuit> find_elementary_circuits(const TradeGraph& graph,
                                              std::size_t max_length = kUnlimitedLength,
                                              std::size_t circuit_budget = 1000000);

/// Maximum, over unordered wallet pairs, of the token's transactions with
/// those endpoints. Throws NoSalesError for a token without records.
std::int64_t wallet_pair_repetition(std::span<const TransactionRecord> records,
                                    const std::string& token_id);

/// Distinct wallets in the token's history divided by its transaction count.
/// Always in (0, 2]. Throws NoSalesError for a token without records.
double unique_wallet_ratio(std::span<const TransactionRecord> records,
                           const std::string& token_id);

struct WashConfig {
    std::int64_t pair_repetition_threshold = 3;  // >= 2
    bool enable_circuit_rule = true;
    std::size_t max_circuit_length = 8;  // 0 = unlimited
    WashScope scope = WashScope::PerToken;
    std::size_t circuit_budget = 1000000;

    void validate() const;
};

struct TokenWashStats {
    std::string token_id;
    std::int64_t max_pair_repetition = 0;
    double unique_wallet_ratio = 0.0;
    std::int64_t circuits_found = 0;
    bool suspect = false;
};

struct WashFlagReport {
    std::vector<TokenWashStats> tokens;              // ordered by token id
    std::vector<TransactionFlag> transaction_flags;  // one per record, record order
    double collection_unique_wallet_ratio = 0.0;
};

/// Scans deduplicated records for wash-trade indicators. A token is suspect
/// iff its pair repetition reaches the threshold or (circuit rule enabled)
/// its scope graph contains an elementary circuit through it. Transactions on
/// a firing pair or circuit are flagged WashSuspect, as are self-transfers
/// (which never enter circuit enumeration). `threads` caps the per-token
/// parallelism; results are identical for any thread count.
WashFlagReport flag_wash_suspects(std::span<const TransactionRecord> records,
                                  const WashConfig& config, std::size_t threads = 1);

struct BenfordResult {
    std::array<std::int64_t, 9> observed{};
    std::array<double, 9> expected_fractions{};
    double chi_square = 0.0;
    std::int64_t n = 0;
};

/// 95% chi-square critical value at 8 degrees of freedom, the reference
/// point for first-digit adherence.
inline constexpr double kBenfordCritical95 = 15.507;

/// First significant decimal digit (1..9). Throws DegenerateInputError for
/// non-positive or non-finite input.
int first_significant_digit(double price);

std::array<double, 9> benford_expected_fractions();

/// Pearson chi-square of real-valued observed digit counts against the
/// Benford expectation n * log10(1 + 1/d).
double benford_chi_square(std::span<const double> observed, double n);

/// First-digit test over positive prices. Throws DegenerateInputError on an
/// empty sequence or a non-positive price.
BenfordResult benford_test(std::span<const double> prices);

}  // namespace nftledger
