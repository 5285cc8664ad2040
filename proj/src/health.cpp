#include "creditnet/health.hpp"

#include "creditnet/error.hpp"
#include "creditnet/graph.hpp"
#include "creditnet/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace creditnet {

RipplingRiskReport rippling_risk_scan(LedgerSnapshot const& snapshot, RateTable const& rates, Currency const& target)
{
    RipplingRiskReport report;
    report.target = target;
    auto const& links = snapshot.links();
    for (WalletIndex i = 0; i < snapshot.wallet_count(); ++i) {
        auto const& id = snapshot.wallet(i).id;
        if (snapshot.is_gateway(id))
            continue;
        std::map<Currency, std::vector<LinkIndex>> enabled;
        for (LinkIndex l : snapshot.incident(i)) {
            if (!effective_no_ripple(snapshot, l, links[l].side_of(id)))
                enabled[links[l].currency].push_back(l);
        }
        ProneWallet prone{id, {}};
        for (auto const& [currency, ls] : enabled) {
            if (ls.size() < 2)
                continue;
            ProneCurrency pc{currency, {}};
            for (LinkIndex l : ls) {
                auto const& link = links[l];
                pc.counterparties.push_back(link.counterparty(id));
                if (snapshot.is_gateway(link.counterparty(id))) {
                    report.credit_at_risk += rates.convert(link.balance, currency, target);
                    ++report.gateway_links;
                }
                if (link.limit.is_bounded())
                    report.limit_gap_exposure += rates.convert(link.limit.bound() - link.balance, currency, target);
            }
            std::sort(pc.counterparties.begin(), pc.counterparties.end());
            prone.currencies.push_back(std::move(pc));
        }
        if (!prone.currencies.empty())
            report.prone.push_back(std::move(prone));
    }
    return report;
}

std::string_view to_string(DisruptionCriterion c) noexcept
{
    return c == DisruptionCriterion::degree ? "degree" : "tx_frequency";
}

DisruptionCriterion parse_disruption_criterion(std::string_view text)
{
    if (text == "degree")
        return DisruptionCriterion::degree;
    if (text == "tx_frequency" || text == "tx-frequency")
        return DisruptionCriterion::tx_frequency;
    throw Error(ErrorKind::config, "unknown criterion '" + std::string(text) + "'");
}

std::vector<RankedWallet> select_disruptive(LedgerSnapshot const& snapshot,
                                            std::optional<std::span<Transaction const>> txlog, std::size_t k,
                                            DisruptionCriterion criterion)
{
    std::vector<RankedWallet> ranked;
    ranked.reserve(snapshot.wallet_count());
    for (auto const& w : snapshot.wallets())
        ranked.push_back(RankedWallet{w.id, 0});

    if (criterion == DisruptionCriterion::degree) {
        SimpleGraph const graph(snapshot);
        for (Vertex v = 0; v < graph.vertex_count(); ++v)
            ranked[v].score = graph.degree(v);
    } else {
        if (!txlog)
            throw Error(ErrorKind::missing_tx_log, "tx_frequency needs a transaction log");
        std::set<WalletId> seen;
        for (auto const& tx : *txlog) {
            seen.clear();
            seen.insert(tx.sender);
            seen.insert(tx.receiver);
            for (auto const& h : tx.hops) {
                seen.insert(h.from);
                seen.insert(h.to);
            }
            for (auto const& w : seen) {
                if (auto i = snapshot.find_wallet(w))
                    ++ranked[*i].score;
            }
        }
    }
    // Wallets are in id order already, so a stable sort settles ties by id.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](RankedWallet const& a, RankedWallet const& b) { return a.score > b.score; });
    ranked.resize(std::min(k, ranked.size()));
    return ranked;
}

ResilienceRecord removal_analysis(LedgerSnapshot const& snapshot, std::span<WalletId const> order)
{
    SimpleGraph const graph(snapshot);
    Mask removed(snapshot.wallet_count(), 0);
    ResilienceRecord record;
    record.initial_wallets = snapshot.wallet_count();
    record.initial_lcc = connected_components(graph).largest_size();
    std::size_t remaining = snapshot.wallet_count();
    for (auto const& id : order) {
        auto const i = snapshot.wallet_index(id);
        if (removed[i])
            throw Error(ErrorKind::config, "wallet " + id.str() + " is removed twice");
        removed[i] = 1;
        --remaining;
        auto const lcc = connected_components(graph, removed).largest_size();
        record.removed.push_back(id);
        record.lcc_sizes.push_back(lcc);
        record.rsl_factors.push_back(lcc == 0 ? std::numeric_limits<double>::quiet_NaN()
                                              : (static_cast<double>(remaining) / 2.0) / static_cast<double>(lcc));
    }
    return record;
}

std::string resilience_csv(ResilienceRecord const& record)
{
    std::ostringstream out;
    out << "removals,lcc_size\n0," << record.initial_lcc << '\n';
    for (std::size_t i = 0; i < record.lcc_sizes.size(); ++i)
        out << i + 1 << ',' << record.lcc_sizes[i] << '\n';
    return out.str();
}

std::string_view to_string(StuckReason r) noexcept
{
    return r == StuckReason::no_rippling ? "no_rippling" : "rippling_no_tx";
}

Amount drainable_through(LedgerSnapshot const& snapshot, LinkIndex link)
{
    auto const& links = snapshot.links();
    auto const& victim = links.at(link);
    auto const [g, w] = snapshot.endpoints(link);
    if (effective_no_ripple(snapshot, link, Side::debtor) || !victim.balance.is_positive())
        return Amount{};

    // Each wallet v is split into a ripple node R_v, through which flow may
    // continue onto links where v allows rippling, and a terminal node T_v,
    // where flow can only stop. Every wallet except the victim and the
    // gateway may receive.
    auto const n = static_cast<std::uint32_t>(snapshot.wallet_count());
    std::vector<WalletId> names;
    names.reserve(2 * n + 2);
    for (auto const& wallet : snapshot.wallets())
        names.emplace_back("0:" + wallet.id.str());
    for (auto const& wallet : snapshot.wallets())
        names.emplace_back("1:" + wallet.id.str());
    names.emplace_back("2:sink");
    names.emplace_back("2:source");
    auto const ripple = [](WalletIndex v) { return v; };
    auto const terminal = [n](WalletIndex v) { return n + v; };
    std::uint32_t const sink = 2 * n;
    std::uint32_t const source = 2 * n + 1;

    std::vector<FlowArc> arcs;
    arcs.push_back(FlowArc{source, ripple(g), victim.balance});
    for (WalletIndex v = 0; v < n; ++v) {
        arcs.push_back(FlowArc{ripple(v), terminal(v), std::nullopt});
        if (v != g && v != w)
            arcs.push_back(FlowArc{terminal(v), sink, std::nullopt});
    }
    for (LinkIndex l = 0; l < links.size(); ++l) {
        auto const& other = links[l];
        if (l == link || other.currency != victim.currency)
            continue;
        auto const [d, c] = snapshot.endpoints(l);
        if (d == w || c == w)
            continue;
        bool const d_open = !effective_no_ripple(snapshot, l, Side::debtor);
        bool const c_open = !effective_no_ripple(snapshot, l, Side::creditor);
        auto const add = [&](WalletIndex from, bool from_open, WalletIndex to, bool to_open,
                             std::optional<Amount> cap) {
            if (!from_open || (cap && !cap->is_positive()))
                return;
            arcs.push_back(FlowArc{ripple(from), to_open ? ripple(to) : terminal(to), cap});
        };
        std::optional<Amount> forward;
        if (other.limit.is_bounded())
            forward = other.limit.bound() - other.balance;
        add(d, d_open, c, c_open, forward);
        add(c, c_open, d, d_open, other.balance);
    }
    FlowGraph const graph(std::move(names), std::move(arcs));
    auto const flow = max_flow(graph, source, sink);
    return flow.unbounded ? victim.balance : std::min(flow.value, victim.balance);
}

StuckCreditReport stuck_credit(LedgerSnapshot const& snapshot, WalletId const& gateway, RateTable const& rates,
                               Currency const& target)
{
    if (!snapshot.is_gateway(gateway))
        throw Error(ErrorKind::not_a_gateway, gateway.str() + " is not a registered gateway");
    StuckCreditReport report;
    report.gateway = gateway;
    report.target = target;
    std::set<WalletId> blocked;
    std::set<WalletId> undrainable;
    auto const& links = snapshot.links();
    for (LinkIndex l : snapshot.incident(snapshot.wallet_index(gateway))) {
        auto const& link = links[l];
        if (link.debtor != gateway || !link.balance.is_positive())
            continue;
        StuckLink s{link.creditor, link.currency, link.balance, Amount{}, Amount{}, std::nullopt};
        if (effective_no_ripple(snapshot, l, Side::debtor)) {
            s.reason = StuckReason::no_rippling;
            blocked.insert(link.creditor);
        } else {
            s.movable = drainable_through(snapshot, l);
            if (s.movable < link.balance) {
                s.reason = StuckReason::rippling_no_tx;
                undrainable.insert(link.creditor);
            }
        }
        if (s.reason) {
            s.stuck_converted = rates.convert(link.balance, link.currency, target);
            report.stuck_total += s.stuck_converted;
        }
        report.links.push_back(std::move(s));
    }
    std::sort(report.links.begin(), report.links.end(), [](StuckLink const& a, StuckLink const& b) {
        return std::tie(a.wallet, a.currency) < std::tie(b.wallet, b.currency);
    });
    report.wallets_no_rippling.assign(blocked.begin(), blocked.end());
    for (auto const& w : undrainable) {
        if (!blocked.contains(w))
            report.wallets_rippling_no_tx.push_back(w);
    }
    return report;
}

CreditAcquisitionReport credit_acquisition(std::span<Transaction const> txlog, std::span<WalletId const> victims,
                                           WalletId const& gateway, RateTable const& rates, Currency const& target,
                                           TimeInterval window)
{
    if (!(window.start < window.end))
        throw Error(ErrorKind::empty_window, "window " + format_timestamp(window.start) + " to " +
                                                 format_timestamp(window.end) + " is empty");
    std::set<WalletId> const victim_set(victims.begin(), victims.end());
    CreditAcquisitionReport report;
    report.gateway = gateway;
    report.target = target;
    report.window = window;

    double rate_sum = 0;
    std::size_t rate_count = 0;
    Amount xrp_paid;
    Amount xrp_received;
    for (auto const& tx : txlog) {
        if (!window.contains(tx.timestamp))
            continue;
        Amount received;
        bool raised = false;
        for (auto const& h : tx.hops) {
            if (h.kind == HopKind::link_increase && h.from == gateway && victim_set.contains(h.to)) {
                received += rates.convert(h.amount, h.currency, target);
                raised = true;
            }
        }
        if (!raised)
            continue;
        auto& cls = tx.circular ? report.circular : report.inbound;
        ++cls.count;
        cls.received += received;
        cls.tx_ids.push_back(tx.id);
        if (!tx.circular)
            continue;
        report.circular_paid[tx.source_currency] += tx.source_amount;
        if (tx.source_currency.is_xrp() && tx.source_amount.is_positive()) {
            rate_sum += static_cast<double>(received.micros()) / static_cast<double>(tx.source_amount.micros());
            ++rate_count;
            xrp_paid += tx.source_amount;
            xrp_received += received;
        }
    }
    if (rate_count > 0) {
        report.simple_rate = rate_sum / static_cast<double>(rate_count);
        report.weighted_rate = static_cast<double>(xrp_received.micros()) / static_cast<double>(xrp_paid.micros());
    }
    return report;
}

}  // namespace creditnet
