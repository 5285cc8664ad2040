#include "creditnet/liquidity.hpp"

#include "creditnet/error.hpp"
#include "creditnet/ledger.hpp"
#include "creditnet/random.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace creditnet {

LedgerSnapshot prune_by_currency(LedgerSnapshot const& snapshot, std::span<Currency const> keep)
{
    if (keep.empty())
        throw Error(ErrorKind::config, "no currencies to keep");
    std::set<Currency> const wanted(keep.begin(), keep.end());
    auto parts = snapshot.to_parts();
    std::erase_if(parts.links, [&](CreditLink const& l) { return !wanted.count(l.currency); });
    if (parts.links.empty())
        throw Error(ErrorKind::empty_result, "no links in the requested currencies");
    return largest_connected_component(LedgerSnapshot::make(std::move(parts)));
}

CreditLink convert_link(CreditLink const& link, Rate rate, Currency const& target)
{
    CreditLink out = link;
    out.currency = target;
    out.balance = rate.apply(link.balance);
    if (link.limit.is_bounded())
        out.limit = Limit(rate.apply(link.limit.bound()));
    return out;
}

namespace {

std::optional<bool> merge_flag(std::optional<bool> a, std::optional<bool> b)
{
    if (a.value_or(false) || b.value_or(false))
        return true;
    if (a || b)
        return false;
    return std::nullopt;
}

}  // namespace

LedgerSnapshot convert_to_common(LedgerSnapshot const& snapshot, RateTable const& rates, Currency const& target)
{
    auto parts = snapshot.to_parts();
    std::map<std::pair<WalletId, WalletId>, CreditLink> merged;
    for (auto const& l : parts.links) {
        auto const rate = rates.find(l.currency, target);
        if (!rate)
            throw Error(ErrorKind::missing_rate, "no rate from " + l.currency.str() + " to " + target.str());
        auto c = convert_link(l, *rate, target);
        auto [it, fresh] = merged.try_emplace({c.debtor, c.creditor}, c);
        if (fresh)
            continue;
        auto& m = it->second;
        m.balance += c.balance;
        m.limit = m.limit.is_bounded() && c.limit.is_bounded() ? Limit(m.limit.bound() + c.limit.bound())
                                                                : Limit::unbounded();
        m.no_ripple_debtor = merge_flag(m.no_ripple_debtor, c.no_ripple_debtor);
        m.no_ripple_creditor = merge_flag(m.no_ripple_creditor, c.no_ripple_creditor);
    }
    parts.links.clear();
    for (auto& [_, l] : merged)
        parts.links.push_back(std::move(l));
    return LedgerSnapshot::make(std::move(parts));
}

FlowGraph::FlowGraph(std::vector<WalletId> nodes, std::vector<FlowArc> arcs)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs))
{
    if (!std::is_sorted(nodes_.begin(), nodes_.end()) ||
        std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
        throw Error(ErrorKind::invariant_violation, "flow graph nodes must be sorted and unique");
    for (auto const& a : arcs_) {
        if (a.from >= nodes_.size() || a.to >= nodes_.size())
            throw Error(ErrorKind::node_missing, "arc endpoint out of range");
        if (a.capacity && a.capacity->is_negative())
            throw Error(ErrorKind::invariant_violation, "negative arc capacity");
    }
}

std::uint32_t FlowGraph::node(WalletId const& id) const
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id)
        throw Error(ErrorKind::node_missing, "wallet " + id.str() + " is not in the flow graph");
    return static_cast<std::uint32_t>(it - nodes_.begin());
}

std::optional<Amount> FlowGraph::out_capacity(std::uint32_t v) const
{
    Amount sum;
    for (auto const& a : arcs_) {
        if (a.from != v)
            continue;
        if (!a.capacity)
            return std::nullopt;
        sum += *a.capacity;
    }
    return sum;
}

std::optional<Amount> FlowGraph::in_capacity(std::uint32_t v) const
{
    Amount sum;
    for (auto const& a : arcs_) {
        if (a.to != v)
            continue;
        if (!a.capacity)
            return std::nullopt;
        sum += *a.capacity;
    }
    return sum;
}

FlowGraph to_flow_graph(LedgerSnapshot const& snapshot)
{
    std::set<Currency> currencies;
    for (auto const& l : snapshot.links())
        currencies.insert(l.currency);
    if (currencies.size() > 1)
        throw Error(ErrorKind::mixed_currency, "flow graph needs a single currency, found " +
                                                   std::to_string(currencies.size()));
    std::vector<WalletId> nodes;
    for (auto const& w : snapshot.wallets())
        nodes.push_back(w.id);
    std::vector<FlowArc> arcs;
    for (LinkIndex i = 0; i < snapshot.link_count(); ++i) {
        auto const& l = snapshot.links()[i];
        auto const [d, c] = snapshot.endpoints(i);
        arcs.push_back(FlowArc{d, c, l.limit.headroom(l.balance)});
        arcs.push_back(FlowArc{c, d, l.balance});
    }
    return FlowGraph(std::move(nodes), std::move(arcs));
}

namespace {

class Dinic {
public:
    Dinic(FlowGraph const& g) : n_(g.nodes().size()), head_(n_, -1)
    {
        std::int64_t bounded = 0;
        for (auto const& a : g.arcs()) {
            if (a.capacity && __builtin_add_overflow(bounded, a.capacity->micros(), &bounded))
                throw Error(ErrorKind::invalid_amount, "total capacity overflows");
        }
        if (__builtin_add_overflow(bounded, std::int64_t{1}, &infinite_))
            throw Error(ErrorKind::invalid_amount, "total capacity overflows");
        for (auto const& a : g.arcs()) {
            if (a.from == a.to)
                continue;
            add(a.from, a.to, a.capacity ? a.capacity->micros() : infinite_);
        }
    }

    std::int64_t infinite() const { return infinite_; }

    std::int64_t run(std::uint32_t s, std::uint32_t t)
    {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            iter_.assign(head_.begin(), head_.end());
            while (std::int64_t pushed = dfs(s, t, std::numeric_limits<std::int64_t>::max())) {
                if (__builtin_add_overflow(flow, pushed, &flow))
                    throw Error(ErrorKind::invalid_amount, "flow overflows");
                if (flow >= infinite_)
                    return flow;  // only an unbounded cut can carry this much
            }
        }
        return flow;
    }

private:
    struct Edge {
        std::uint32_t to;
        int next;
        std::int64_t cap;
    };

    void add(std::uint32_t a, std::uint32_t b, std::int64_t cap)
    {
        edges_.push_back({b, head_[a], cap});
        head_[a] = static_cast<int>(edges_.size() - 1);
        edges_.push_back({a, head_[b], 0});
        head_[b] = static_cast<int>(edges_.size() - 1);
    }

    bool bfs(std::uint32_t s, std::uint32_t t)
    {
        level_.assign(n_, -1);
        std::vector<std::uint32_t> queue{s};
        level_[s] = 0;
        for (std::size_t i = 0; i < queue.size(); ++i) {
            auto const v = queue[i];
            for (int e = head_[v]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
                auto const& edge = edges_[static_cast<std::size_t>(e)];
                if (edge.cap > 0 && level_[edge.to] < 0) {
                    level_[edge.to] = level_[v] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(std::uint32_t v, std::uint32_t t, std::int64_t limit)
    {
        if (v == t)
            return limit;
        for (int& e = iter_[v]; e != -1; e = edges_[static_cast<std::size_t>(e)].next) {
            auto& edge = edges_[static_cast<std::size_t>(e)];
            if (edge.cap <= 0 || level_[edge.to] != level_[v] + 1)
                continue;
            std::int64_t const pushed = dfs(edge.to, t, std::min(limit, edge.cap));
            if (pushed > 0) {
                edge.cap -= pushed;
                edges_[static_cast<std::size_t>(e ^ 1)].cap += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::size_t n_;
    std::vector<int> head_;
    std::vector<int> iter_;
    std::vector<int> level_;
    std::vector<Edge> edges_;
    std::int64_t infinite_ = 0;
};

FlowValue bound_min(std::optional<Amount> a, std::optional<Amount> b)
{
    if (!a && !b)
        return FlowValue{Amount{}, true};
    if (!a)
        return FlowValue{*b, false};
    if (!b)
        return FlowValue{*a, false};
    return FlowValue{min(*a, *b), false};
}

}  // namespace

FlowValue max_flow(FlowGraph const& graph, std::uint32_t source, std::uint32_t sink)
{
    if (source >= graph.nodes().size() || sink >= graph.nodes().size())
        throw Error(ErrorKind::node_missing, "flow endpoint out of range");
    if (source == sink)
        throw Error(ErrorKind::config, "source and sink must differ");
    Dinic dinic(graph);
    std::int64_t const flow = dinic.run(source, sink);
    if (flow >= dinic.infinite())
        return FlowValue{Amount{}, true};
    return FlowValue{Amount::from_micros(flow), false};
}

FlowValue max_flow(FlowGraph const& graph, WalletId const& source, WalletId const& sink)
{
    return max_flow(graph, graph.node(source), graph.node(sink));
}

PairLiquidity pair_liquidity(FlowGraph const& graph, std::uint32_t source, std::uint32_t sink)
{
    PairLiquidity p;
    p.source = graph.nodes()[source];
    p.sink = graph.nodes()[sink];
    p.flow = max_flow(graph, source, sink);
    p.endpoint_bound = bound_min(graph.out_capacity(source), graph.in_capacity(sink));
    if (p.flow.unbounded || p.endpoint_bound.unbounded) {
        p.has_liquidity = p.flow.unbounded && p.endpoint_bound.unbounded;
    } else {
        auto const gap = p.endpoint_bound.value - p.flow.value;
        p.has_liquidity = gap.micros() <= 1 && gap.micros() >= -1;
    }
    return p;
}

LiquiditySample liquidity_sample(FlowGraph const& graph, std::size_t n_pairs, std::uint64_t seed, unsigned threads)
{
    std::uint64_t const n = graph.nodes().size();
    if (n < 2)
        throw Error(ErrorKind::not_enough_pairs, "need at least two wallets");
    std::uint64_t const available = n * (n - 1);
    if (n_pairs > available)
        throw Error(ErrorKind::not_enough_pairs, "asked for " + std::to_string(n_pairs) + " pairs, only " +
                                                     std::to_string(available) + " exist");
    Rng rng(seed);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(n_pairs);
    if (n_pairs * 2 > available) {
        for (std::uint32_t s = 0; s < n; ++s) {
            for (std::uint32_t t = 0; t < n; ++t) {
                if (s != t)
                    pairs.emplace_back(s, t);
            }
        }
        rng.shuffle(pairs);
        pairs.resize(n_pairs);
    } else {
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        while (pairs.size() < n_pairs) {
            auto const s = static_cast<std::uint32_t>(rng.below(n));
            auto const t = static_cast<std::uint32_t>(rng.below(n - 1));
            std::pair<std::uint32_t, std::uint32_t> const p{s, t >= s ? t + 1 : t};
            if (seen.insert(p).second)
                pairs.push_back(p);
        }
    }

    LiquiditySample sample;
    sample.pairs.resize(pairs.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(pairs.size(), 1))));
    std::vector<std::exception_ptr> failures(threads);
    auto work = [&](std::size_t lo, std::size_t hi, unsigned w) {
        try {
            for (std::size_t i = lo; i < hi; ++i)
                sample.pairs[i] = pair_liquidity(graph, pairs[i].first, pairs[i].second);
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0, pairs.size(), 0);
    } else {
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back(work, pairs.size() * w / threads, pairs.size() * (w + 1) / threads, w);
        for (auto& t : workers)
            t.join();
    }
    for (auto const& f : failures) {
        if (f)
            std::rethrow_exception(f);
    }
    std::size_t const liquid = static_cast<std::size_t>(
        std::count_if(sample.pairs.begin(), sample.pairs.end(), [](PairLiquidity const& p) { return p.has_liquidity; }));
    sample.fraction = pairs.empty() ? 0.0 : static_cast<double>(liquid) / static_cast<double>(pairs.size());
    return sample;
}

}  // namespace creditnet
