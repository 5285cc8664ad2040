#pragma once

#include "creditnet/rates.hpp"
#include "creditnet/snapshot.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace creditnet {

/// Keeps links in the given currencies, then the largest connected component.
/// Throws EmptyResult (nothing survives) and ConfigError (empty `keep`).
LedgerSnapshot prune_by_currency(LedgerSnapshot const& snapshot, std::span<Currency const> keep);

/// Balance and bounded limit multiplied by `rate` (half-even to the micro),
/// currency rewritten to `target`.
CreditLink convert_link(CreditLink const& link, Rate rate, Currency const& target);

/// Every link converted to `target`. Links that end up sharing a
/// (debtor, creditor) pair are merged: balances and limits add (unbounded if
/// either is), and a side flag is set if it was set on any of them.
/// Throws MissingRate.
LedgerSnapshot convert_to_common(LedgerSnapshot const& snapshot, RateTable const& rates, Currency const& target);

struct FlowArc {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::optional<Amount> capacity;  // nullopt: unbounded
};

class FlowGraph {
public:
    FlowGraph() = default;
    FlowGraph(std::vector<WalletId> nodes, std::vector<FlowArc> arcs);

    std::vector<WalletId> const& nodes() const noexcept { return nodes_; }
    std::vector<FlowArc> const& arcs() const noexcept { return arcs_; }
    /// Throws NodeMissing.
    std::uint32_t node(WalletId const& id) const;

    /// Sum of capacities leaving / entering a node; nullopt if any is unbounded.
    std::optional<Amount> out_capacity(std::uint32_t v) const;
    std::optional<Amount> in_capacity(std::uint32_t v) const;

private:
    std::vector<WalletId> nodes_;  // sorted
    std::vector<FlowArc> arcs_;
};

/// Link (d, c, balance b, limit L) gives d->c with L - b and c->d with b.
/// Throws MixedCurrency.
FlowGraph to_flow_graph(LedgerSnapshot const& snapshot);

struct FlowValue {
    Amount value;
    bool unbounded = false;
};

/// Exact maximum flow (Dinic on micro-units). Unbounded arcs carry
/// 1 + the sum of all bounded capacities, so a flow reaching that is reported
/// unbounded. Throws NodeMissing, ConfigError when source == sink.
FlowValue max_flow(FlowGraph const& graph, std::uint32_t source, std::uint32_t sink);
FlowValue max_flow(FlowGraph const& graph, WalletId const& source, WalletId const& sink);

struct PairLiquidity {
    WalletId source;
    WalletId sink;
    FlowValue flow;
    /// min(out-capacity of source, in-capacity of sink)
    FlowValue endpoint_bound;
    bool has_liquidity = false;
};

struct LiquiditySample {
    std::vector<PairLiquidity> pairs;  // in sampling order
    double fraction = 0;
};

/// Liquidity of one ordered pair: flow equals the endpoint bound within one
/// micro-unit.
PairLiquidity pair_liquidity(FlowGraph const& graph, std::uint32_t source, std::uint32_t sink);

/// `n_pairs` distinct ordered pairs without self-pairs, drawn uniformly from
/// the seed. Throws NotEnoughPairs.
LiquiditySample liquidity_sample(FlowGraph const& graph, std::size_t n_pairs, std::uint64_t seed,
                                 unsigned threads = 1);

}  // namespace creditnet
