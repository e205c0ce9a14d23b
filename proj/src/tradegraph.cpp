#include "nftledger/tradegraph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "nftledger/errors.hpp"

namespace nftledger {

namespace {

// -------------------------- circuit enumeration --------------------------

// Parallel edges collapsed and self-loops dropped; this is the graph the
// enumerators walk. Targets are sorted so exploration order is wallet order.
struct SimpleDigraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> next;
};

SimpleDigraph simplify(const TradeGraph& graph) {
    SimpleDigraph s;
    s.n = graph.node_count();
    s.next.resize(s.n);
    for (const auto& e : graph.edges()) {
        if (e.from == e.to) continue;
        s.next[e.from].push_back(e.to);
    }
    for (auto& row : s.next) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return s;
}

// Iterative Tarjan over a locally indexed subgraph.
std::vector<std::vector<std::uint32_t>> local_sccs(
    const std::vector<std::vector<std::uint32_t>>& adj) {
    const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
    constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(n, kUnset), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::vector<std::uint32_t>> comps;
    std::uint32_t counter = 0;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    std::vector<Frame> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        frames.push_back({root, 0});
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            if (fr.child < adj[fr.v].size()) {
                std::uint32_t w = adj[fr.v][fr.child++];
                if (index[w] == kUnset) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[fr.v] = std::min(lowlink[fr.v], index[w]);
                }
            } else {
                std::uint32_t v = fr.v;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<std::uint32_t> comp;
                    while (true) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                        if (w == v) break;
                    }
                    comps.push_back(std::move(comp));
                }
            }
        }
    }
    return comps;
}

class CircuitSink {
public:
    CircuitSink(std::size_t budget, std::vector<std::vector<std::uint32_t>>& out)
        : budget_(budget), out_(out) {}

    void emit(std::vector<std::uint32_t> nodes) {
        if (out_.size() >= budget_) throw BudgetExceededError();
        out_.push_back(std::move(nodes));
    }

private:
    std::size_t budget_;
    std::vector<std::vector<std::uint32_t>>& out_;
};

// Johnson's blocked search within one strongly connected component.
// Nodes are component-local; emits circuits through local node 0.
class JohnsonSearch {
public:
    JohnsonSearch(const std::vector<std::vector<std::uint32_t>>& adj,
                  const std::vector<std::uint32_t>& to_global, CircuitSink& sink)
        : adj_(adj), to_global_(to_global), sink_(sink),
          blocked_(adj.size(), 0), block_list_(adj.size()) {}

    void run() { circuit(0); }

private:
    bool circuit(std::uint32_t v) {
        bool found = false;
        path_.push_back(v);
        blocked_[v] = 1;
        for (std::uint32_t w : adj_[v]) {
            if (w == 0) {
                std::vector<std::uint32_t> global;
                global.reserve(path_.size());
                for (std::uint32_t u : path_) global.push_back(to_global_[u]);
                sink_.emit(std::move(global));
                found = true;
            } else if (!blocked_[w]) {
                if (circuit(w)) found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (std::uint32_t w : adj_[v]) {
                auto& list = block_list_[w];
                if (std::find(list.begin(), list.end(), v) == list.end())
                    list.push_back(v);
            }
        }
        path_.pop_back();
        return found;
    }

    void unblock(std::uint32_t v) {
        blocked_[v] = 0;
        while (!block_list_[v].empty()) {
            std::uint32_t w = block_list_[v].back();
            block_list_[v].pop_back();
            if (blocked_[w]) unblock(w);
        }
    }

    const std::vector<std::vector<std::uint32_t>>& adj_;
    const std::vector<std::uint32_t>& to_global_;
    CircuitSink& sink_;
    std::vector<char> blocked_;
    std::vector<std::vector<std::uint32_t>> block_list_;
    std::vector<std::uint32_t> path_;
};

// Unbounded enumeration: process each SCC from its least vertex, remove it,
// re-split, repeat. Every circuit is found once, rooted at its least wallet.
void enumerate_unbounded(const SimpleDigraph& graph, CircuitSink& sink) {
    std::vector<std::vector<std::uint32_t>> work;
    {
        std::vector<std::vector<std::uint32_t>> trivial(graph.n);
        for (std::uint32_t v = 0; v < graph.n; ++v) trivial[v] = graph.next[v];
        for (auto& comp : local_sccs(trivial))
            if (comp.size() >= 2) work.push_back(std::move(comp));
    }
    std::vector<std::uint32_t> local_of(graph.n, 0);
    while (!work.empty()) {
        std::vector<std::uint32_t> comp = std::move(work.back());
        work.pop_back();
        std::sort(comp.begin(), comp.end());  // comp[0] is the least wallet

        // Component-local adjacency; local order preserves wallet order.
        std::vector<char> member(graph.n, 0);
        for (std::size_t i = 0; i < comp.size(); ++i) {
            member[comp[i]] = 1;
            local_of[comp[i]] = static_cast<std::uint32_t>(i);
        }
        std::vector<std::vector<std::uint32_t>> adj(comp.size());
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (std::uint32_t w : graph.next[comp[i]])
                if (member[w]) adj[i].push_back(local_of[w]);

        JohnsonSearch(adj, comp, sink).run();

        // Remove the root and queue the remaining strongly connected pieces.
        std::vector<std::vector<std::uint32_t>> rest(comp.size());
        for (std::size_t i = 1; i < comp.size(); ++i)
            for (std::uint32_t w : adj[i])
                if (w != 0) rest[i].push_back(w);
        for (auto& sub : local_sccs(rest)) {
            if (sub.size() < 2) continue;
            std::vector<std::uint32_t> global;
            global.reserve(sub.size());
            for (std::uint32_t i : sub) global.push_back(comp[i]);
            work.push_back(std::move(global));
        }
    }
}

// Length-bounded enumeration: explicit-stack backtracking from each start
// node over strictly larger nodes, so each circuit appears once, canonical.
void enumerate_bounded(const SimpleDigraph& graph, std::size_t max_length,
                       CircuitSink& sink) {
    std::vector<char> on_path(graph.n, 0);
    struct Frame {
        std::uint32_t node;
        std::size_t child;
    };
    std::vector<Frame> frames;
    std::vector<std::uint32_t> path;
    for (std::uint32_t s = 0; s < graph.n; ++s) {
        if (graph.next[s].empty()) continue;
        frames.assign(1, {s, 0});
        path.assign(1, s);
        on_path[s] = 1;
        while (!frames.empty()) {
            Frame& fr = frames.back();
            if (fr.child < graph.next[fr.node].size()) {
                std::uint32_t w = graph.next[fr.node][fr.child++];
                if (w == s) {
                    sink.emit(path);
                } else if (w > s && !on_path[w] && path.size() < max_length) {
                    frames.push_back({w, 0});
                    path.push_back(w);
                    on_path[w] = 1;
                }
            } else {
                on_path[fr.node] = 0;
                path.pop_back();
                frames.pop_back();
            }
        }
    }
}

struct PairHash {
    std::size_t operator()(const std::pair<std::uint32_t, std::uint32_t>& p) const {
        return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
    }
};

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> stop{false};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    // Indices are dispatched in order, so the smallest failed index is the
    // same for every thread count.
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace

// ------------------------------ TradeGraph -------------------------------

TradeGraph TradeGraph::build(std::span<const TransactionRecord> records) {
    std::vector<std::size_t> all(records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return build(records, all);
}

TradeGraph TradeGraph::build(std::span<const TransactionRecord> records,
                             std::span<const std::size_t> subset) {
    TradeGraph g;
    g.wallets_.reserve(subset.size() * 2);
    for (std::size_t idx : subset) {
        g.wallets_.push_back(records[idx].from_wallet);
        g.wallets_.push_back(records[idx].to_wallet);
    }
    std::sort(g.wallets_.begin(), g.wallets_.end());
    g.wallets_.erase(std::unique(g.wallets_.begin(), g.wallets_.end()),
                     g.wallets_.end());

    auto node_of = [&](const std::string& wallet) {
        auto it = std::lower_bound(g.wallets_.begin(), g.wallets_.end(), wallet);
        return static_cast<std::uint32_t>(it - g.wallets_.begin());
    };

    g.out_.resize(g.wallets_.size());
    g.edges_.reserve(subset.size());
    for (std::size_t idx : subset) {
        const auto& rec = records[idx];
        TradeEdge edge;
        edge.from = node_of(rec.from_wallet);
        edge.to = node_of(rec.to_wallet);
        edge.token_id = rec.token_id;
        edge.timestamp = rec.timestamp;
        edge.price_native = rec.price_native;
        edge.tx_hash = rec.tx_hash;
        edge.record_index = idx;
        g.out_[edge.from].push_back(g.edges_.size());
        g.edges_.push_back(std::move(edge));
    }
    return g;
}

TradeGraph build_graph(std::span<const TransactionRecord> records, WashScope scope) {
    if (scope == WashScope::PerToken && records.empty())
        throw ContractError("per-token graph requires a nonempty record set");
    return TradeGraph::build(records);
}

std::string_view to_string(WashScope scope) {
    return scope == WashScope::PerToken ? "per_token" : "per_collection";
}

std::optional<WashScope> wash_scope_from_string(std::string_view text) {
    if (text == "per_token") return WashScope::PerToken;
    if (text == "per_collection") return WashScope::PerCollection;
    return std::nullopt;
}

std::vector<Circuit> find_elementary_circuits(const TradeGraph& graph,
                                              std::size_t max_length,
                                              std::size_t circuit_budget) {
    if (max_length != kUnlimitedLength && max_length < 2)
        throw ContractError("max_length must be >= 2 or unlimited");

    SimpleDigraph simple = simplify(graph);
    std::vector<std::vector<std::uint32_t>> sequences;
    CircuitSink sink(circuit_budget, sequences);
    if (max_length >= simple.n)
        enumerate_unbounded(simple, sink);  // the bound cannot bind
    else
        enumerate_bounded(simple, max_length, sink);

    std::sort(sequences.begin(), sequences.end(),
              [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });

    std::unordered_map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>,
                       PairHash>
        pair_edges;
    for (std::size_t i = 0; i < graph.edges().size(); ++i) {
        const auto& e = graph.edges()[i];
        if (e.from != e.to) pair_edges[{e.from, e.to}].push_back(i);
    }

    std::vector<Circuit> circuits;
    circuits.reserve(sequences.size());
    for (auto& seq : sequences) {
        Circuit c;
        c.hop_edges.resize(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) {
            std::uint32_t u = seq[i];
            std::uint32_t v = seq[(i + 1) % seq.size()];
            c.hop_edges[i] = pair_edges.at({u, v});
        }
        c.nodes = std::move(seq);
        circuits.push_back(std::move(c));
    }
    return circuits;
}

// --------------------------- per-token metrics ---------------------------

namespace {

std::vector<std::size_t> indices_of_token(std::span<const TransactionRecord> records,
                                          const std::string& token_id) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].token_id == token_id) out.push_back(i);
    return out;
}

std::int64_t max_pair_count(std::span<const TransactionRecord> records,
                            std::span<const std::size_t> subset) {
    std::unordered_map<std::string, std::int64_t> counts;
    std::int64_t best = 0;
    for (std::size_t idx : subset) {
        const auto& rec = records[idx];
        const std::string& a = std::min(rec.from_wallet, rec.to_wallet);
        const std::string& b = std::max(rec.from_wallet, rec.to_wallet);
        best = std::max(best, ++counts[a + '\x1f' + b]);
    }
    return best;
}

double wallet_ratio(std::span<const TransactionRecord> records,
                    std::span<const std::size_t> subset) {
    std::unordered_set<std::string> wallets;
    for (std::size_t idx : subset) {
        wallets.insert(records[idx].from_wallet);
        wallets.insert(records[idx].to_wallet);
    }
    return static_cast<double>(wallets.size()) / static_cast<double>(subset.size());
}

}  // namespace

std::int64_t wallet_pair_repetition(std::span<const TransactionRecord> records,
                                    const std::string& token_id) {
    auto subset = indices_of_token(records, token_id);
    if (subset.empty()) throw NoSalesError("no sales for token " + token_id);
    return max_pair_count(records, subset);
}

double unique_wallet_ratio(std::span<const TransactionRecord> records,
                           const std::string& token_id) {
    auto subset = indices_of_token(records, token_id);
    if (subset.empty()) throw NoSalesError("no sales for token " + token_id);
    return wallet_ratio(records, subset);
}

// ------------------------------ wash scan --------------------------------

void WashConfig::validate() const {
    if (pair_repetition_threshold < 2)
        throw ContractError("pair_repetition_threshold must be >= 2");
    if (max_circuit_length == 1)
        throw ContractError("max_circuit_length must be 0 (unlimited) or >= 2");
    if (circuit_budget == 0) throw ContractError("circuit_budget must be positive");
}

WashFlagReport flag_wash_suspects(std::span<const TransactionRecord> records,
                                  const WashConfig& config, std::size_t threads) {
    config.validate();
    const std::size_t effective_max =
        config.max_circuit_length == 0 ? kUnlimitedLength : config.max_circuit_length;

    // Group record indices by token, tokens ordered by id.
    std::vector<std::string> token_order;
    std::unordered_map<std::string, std::vector<std::size_t>> by_token;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, inserted] = by_token.try_emplace(records[i].token_id);
        if (inserted) token_order.push_back(records[i].token_id);
        it->second.push_back(i);
    }
    std::sort(token_order.begin(), token_order.end(),
              [](const std::string& a, const std::string& b) { return natural_less(a, b); });

    std::vector<std::string> pair_reason(records.size());
    std::vector<std::string> circuit_reason(records.size());

    auto circuit_label = [](const TradeGraph& graph, const Circuit& c) {
        std::string label = "on elementary circuit ";
        for (std::uint32_t node : c.nodes) {
            label += graph.wallets()[node];
            label += "->";
        }
        label += graph.wallets()[c.nodes[0]];
        return label;
    };

    // Collection-scope circuits are found once on the shared graph.
    std::vector<std::int64_t> collection_circuits_of(token_order.size(), 0);
    if (config.scope == WashScope::PerCollection && config.enable_circuit_rule &&
        !records.empty()) {
        TradeGraph graph = TradeGraph::build(records);
        auto circuits =
            find_elementary_circuits(graph, effective_max, config.circuit_budget);
        std::unordered_map<std::string, std::size_t> token_slot;
        for (std::size_t i = 0; i < token_order.size(); ++i)
            token_slot.emplace(token_order[i], i);
        for (const auto& c : circuits) {
            std::unordered_set<std::string> touched;
            std::string label = circuit_label(graph, c);
            for (const auto& hop : c.hop_edges) {
                for (std::size_t edge_id : hop) {
                    const auto& edge = graph.edges()[edge_id];
                    if (circuit_reason[edge.record_index].empty())
                        circuit_reason[edge.record_index] = label;
                    touched.insert(edge.token_id);
                }
            }
            for (const auto& token : touched) ++collection_circuits_of[token_slot.at(token)];
        }
    }

    std::vector<TokenWashStats> stats(token_order.size());
    parallel_for(token_order.size(), threads, [&](std::size_t slot) {
        const std::string& token = token_order[slot];
        const auto& subset = by_token.at(token);

        TokenWashStats st;
        st.token_id = token;
        st.unique_wallet_ratio = wallet_ratio(records, subset);

        // Pair rule: every transaction on a pair at/over the threshold fires.
        std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> pairs;
        for (std::size_t idx : subset) {
            const auto& rec = records[idx];
            std::pair<std::string, std::string> key =
                std::minmax(rec.from_wallet, rec.to_wallet);
            pairs[key].push_back(idx);
        }
        for (const auto& [key, txs] : pairs) {
            auto n = static_cast<std::int64_t>(txs.size());
            st.max_pair_repetition = std::max(st.max_pair_repetition, n);
            if (n >= config.pair_repetition_threshold) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "wallet pair repeated %lld times (threshold %lld)",
                              static_cast<long long>(n),
                              static_cast<long long>(config.pair_repetition_threshold));
                for (std::size_t idx : txs) pair_reason[idx] = buf;
            }
        }

        if (config.enable_circuit_rule) {
            if (config.scope == WashScope::PerToken) {
                TradeGraph graph = TradeGraph::build(records, subset);
                auto circuits =
                    find_elementary_circuits(graph, effective_max, config.circuit_budget);
                st.circuits_found = static_cast<std::int64_t>(circuits.size());
                for (const auto& c : circuits) {
                    std::string label = circuit_label(graph, c);
                    for (const auto& hop : c.hop_edges)
                        for (std::size_t edge_id : hop) {
                            std::size_t rec_idx = graph.edges()[edge_id].record_index;
                            if (circuit_reason[rec_idx].empty())
                                circuit_reason[rec_idx] = label;
                        }
                }
            } else {
                st.circuits_found = collection_circuits_of[slot];
            }
        }

        st.suspect = st.max_pair_repetition >= config.pair_repetition_threshold ||
                     (config.enable_circuit_rule && st.circuits_found > 0);
        stats[slot] = std::move(st);
    });

    WashFlagReport report;
    report.tokens = std::move(stats);

    report.transaction_flags.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        std::string reason;
        auto append = [&reason](std::string_view part) {
            if (part.empty()) return;
            if (!reason.empty()) reason += "; ";
            reason += part;
        };
        if (rec.from_wallet == rec.to_wallet) append("self-transfer");
        append(pair_reason[i]);
        append(circuit_reason[i]);
        report.transaction_flags.push_back(
            {rec.tx_hash, rec.token_id,
             reason.empty() ? FlagKind::Clean : FlagKind::WashSuspect, std::move(reason)});
    }

    if (!records.empty()) {
        std::unordered_set<std::string> wallets;
        for (const auto& rec : records) {
            wallets.insert(rec.from_wallet);
            wallets.insert(rec.to_wallet);
        }
        report.collection_unique_wallet_ratio =
            static_cast<double>(wallets.size()) / static_cast<double>(records.size());
    }
    return report;
}

// -------------------------------- Benford --------------------------------

int first_significant_digit(double price) {
    if (!std::isfinite(price) || !(price > 0))
        throw DegenerateInputError("first significant digit requires a positive price");
    int exponent = static_cast<int>(std::floor(std::log10(price)));
    double mantissa = price / std::pow(10.0, exponent);
    while (mantissa < 1.0) mantissa *= 10.0;
    while (mantissa >= 10.0) mantissa /= 10.0;
    return static_cast<int>(mantissa);
}

std::array<double, 9> benford_expected_fractions() {
    std::array<double, 9> p{};
    for (int d = 1; d <= 9; ++d) p[d - 1] = std::log10(1.0 + 1.0 / d);
    return p;
}

double benford_chi_square(std::span<const double> observed, double n) {
    if (observed.size() != 9)
        throw ContractError("benford_chi_square expects 9 digit counts");
    if (!(n > 0)) throw DegenerateInputError("benford_chi_square requires n > 0");
    auto p = benford_expected_fractions();
    double chi = 0.0;
    for (int d = 0; d < 9; ++d) {
        double expected = n * p[d];
        double diff = observed[d] - expected;
        chi += diff * diff / expected;
    }
    return chi;
}

BenfordResult benford_test(std::span<const double> prices) {
    if (prices.empty())
        throw DegenerateInputError("benford_test requires at least one price");
    BenfordResult result;
    result.expected_fractions = benford_expected_fractions();
    for (double price : prices) ++result.observed[first_significant_digit(price) - 1];
    result.n = static_cast<std::int64_t>(prices.size());

    std::array<double, 9> observed{};
    for (int d = 0; d < 9; ++d) observed[d] = static_cast<double>(result.observed[d]);
    result.chi_square = benford_chi_square(observed, static_cast<double>(result.n));
    return result;
}

}  // namespace nftledger
