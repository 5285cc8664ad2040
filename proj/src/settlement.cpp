#include "creditnet/settlement.hpp"

#include "creditnet/error.hpp"
#include "creditnet/graph.hpp"
#include "creditnet/hash.hpp"
#include "creditnet/ledger.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace creditnet {

std::string_view to_string(HopKind kind) noexcept
{
    switch (kind) {
    case HopKind::link_increase: return "link_increase";
    case HopKind::link_decrease: return "link_decrease";
    case HopKind::offer_consume: return "offer_consume";
    case HopKind::xrp_transfer: return "xrp_transfer";
    }
    return "link_increase";
}

HopKind parse_hop_kind(std::string_view text)
{
    for (auto kind : {HopKind::link_increase, HopKind::link_decrease, HopKind::offer_consume, HopKind::xrp_transfer}) {
        if (to_string(kind) == text)
            return kind;
    }
    throw Error(ErrorKind::parse, "unknown hop kind '" + std::string(text) + "'");
}

bool Transaction::involves_xrp() const
{
    if (currency.is_xrp() || source_currency.is_xrp())
        return true;
    return std::any_of(hops.begin(), hops.end(), [](PathHop const& h) {
        return h.kind == HopKind::xrp_transfer || h.currency.is_xrp() ||
               (h.kind == HopKind::offer_consume && h.out_currency.is_xrp());
    });
}

void finalize_transaction(Transaction& tx)
{
    tx.circular = tx.sender == tx.receiver;
    tx.cross_currency = tx.source_currency != tx.currency;
    if (!tx.hops.empty()) {
        tx.offers_used = static_cast<int>(
            std::count_if(tx.hops.begin(), tx.hops.end(), [](PathHop const& h) { return h.kind == HopKind::offer_consume; }));
        std::set<WalletId> middle;
        for (auto const& h : tx.hops) {
            for (auto const* w : {&h.from, &h.to}) {
                if (*w != tx.sender && *w != tx.receiver)
                    middle.insert(*w);
            }
        }
        tx.intermediaries = static_cast<int>(middle.size());
    }

    std::ostringstream canonical;
    canonical << format_timestamp(tx.timestamp) << '|' << tx.sender.str() << '|' << tx.receiver.str() << '|'
              << tx.amount.to_string() << '|' << tx.currency.str() << '|' << tx.source_amount.to_string() << '|'
              << tx.source_currency.str();
    for (auto const& h : tx.hops) {
        canonical << '|' << h.path << ',' << to_string(h.kind) << ',' << h.from.str() << ',' << h.to.str() << ','
                  << h.currency.str() << ',' << h.amount.to_string();
        if (h.kind == HopKind::offer_consume)
            canonical << ',' << h.offer_id << ',' << h.out_currency.str() << ',' << h.out_amount.to_string();
    }
    tx.id = sha256_hex(canonical.str());
}

bool rippling_allowed(LedgerSnapshot const& snapshot, WalletId const& wallet, CreditLink const& link_a,
                      CreditLink const& link_b)
{
    if (!link_a.touches(wallet) || !link_b.touches(wallet))
        throw Error(ErrorKind::not_incident, "wallet " + wallet.str() + " is not an endpoint of both links");
    if (link_a.currency != link_b.currency)
        return false;
    auto side_blocked = [&](CreditLink const& link) {
        if (auto i = snapshot.find_link(link.debtor, link.creditor, link.currency))
            return effective_no_ripple(snapshot, *i, link.side_of(wallet));
        // A link that is not part of the snapshot is judged on its own flags.
        if (snapshot.wallet(wallet).default_ripple)
            return false;
        return link.no_ripple(link.side_of(wallet)).value_or(false);
    };
    return !side_blocked(link_a) && !side_blocked(link_b);
}

namespace {

constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

struct Step {
    HopKind kind;
    WalletIndex from;
    WalletIndex to;
    std::uint32_t ref;  // link index or offer index
};

/// Mutable balances used while a transaction is being filled.
struct WorkingState {
    std::vector<Amount> balance;
    std::vector<Amount> gives;
    std::vector<Amount> takes;
    std::vector<Amount> xrp;

    explicit WorkingState(LedgerSnapshot const& s)
    {
        for (auto const& l : s.links())
            balance.push_back(l.balance);
        for (auto const& o : s.offers()) {
            gives.push_back(o.gives_amount);
            takes.push_back(o.takes_amount);
        }
        for (auto const& w : s.wallets())
            xrp.push_back(w.xrp);
    }
};

using Capacity = std::optional<Amount>;  // nullopt: unbounded

Capacity cap_min(Capacity a, Amount b) { return a ? min(*a, b) : b; }

class PathSearch {
public:
    PathSearch(LedgerSnapshot const& snapshot, TxIntent const& intent, PathSearchOptions const& options)
        : s_(snapshot), intent_(intent), options_(options)
    {
        sender_ = s_.wallet_index(intent.sender);
        receiver_ = s_.wallet_index(intent.receiver);
        source_ = intent.source_currency();
        if (intent.first_hop_to)
            first_to_ = s_.wallet_index(*intent.first_hop_to);
        if (intent.last_hop_from)
            last_from_ = s_.wallet_index(*intent.last_hop_from);

        // Offers per owner, best rate first, then oldest, then id.
        std::vector<std::uint32_t> order(s_.offers().size());
        for (std::uint32_t i = 0; i < order.size(); ++i)
            order[i] = i;
        auto const& offers = s_.offers();
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            auto const& x = offers[a];
            auto const& y = offers[b];
            auto const rx = x.rate();
            auto const ry = y.rate();
            return std::tie(x.takes_currency, x.gives_currency, ry, x.created_at, x.id) <
                   std::tie(y.takes_currency, y.gives_currency, rx, y.created_at, y.id);
        });
        offer_rank_.assign(offers.size(), 0);
        offers_by_owner_.resize(s_.wallet_count());
        for (std::uint32_t r = 0; r < order.size(); ++r) {
            offer_rank_[order[r]] = r;
            offers_by_owner_[s_.wallet_index(offers[order[r]].owner)].push_back(order[r]);
        }
        for (std::uint32_t i = 0; i < offers.size(); ++i) {
            if (offers[i].takes_currency.is_xrp())
                xrp_takers_.insert(s_.wallet_index(offers[i].owner));
        }
        compute_bounds();
    }

    std::vector<std::vector<Step>> run()
    {
        std::vector<std::vector<Step>> found;
        std::vector<std::size_t> layer{push_root()};
        for (int transfers = 0; transfers < intent_.max_hops && !layer.empty(); ++transfers) {
            std::vector<std::size_t> next;
            std::vector<std::size_t> complete;
            // Offer fills do not add a transfer, so they stay in this layer.
            for (std::size_t i = 0; i < layer.size(); ++i)
                expand(layer[i], layer, next, complete);
            std::vector<std::vector<Step>> paths;
            for (auto n : complete)
                paths.push_back(unwind(n));
            std::sort(paths.begin(), paths.end(),
                      [&](auto const& a, auto const& b) { return path_less(a, b); });
            found.insert(found.end(), paths.begin(), paths.end());
            if (found.size() >= options_.max_candidates)
                break;
            if (next.size() > options_.max_frontier)
                next.resize(options_.max_frontier);
            layer = std::move(next);
        }
        if (found.size() > options_.max_candidates)
            found.resize(options_.max_candidates);
        return found;
    }

    std::uint32_t sender() const { return sender_; }

private:
    struct Node {
        std::size_t parent;
        Step step;
        WalletIndex at;
        Currency currency;
        int transfers;
        bool must_fill;  // arrived by XRP transfer to fill an offer here
    };

    std::size_t push_root()
    {
        nodes_.push_back(Node{none, Step{HopKind::link_increase, sender_, sender_, none}, sender_, source_, 0, false});
        return 0;
    }

    bool on_path(std::size_t node, WalletIndex w) const
    {
        for (std::size_t n = node; n != none; n = nodes_[n].parent) {
            if (nodes_[n].at == w)
                return true;
        }
        return false;
    }

    bool root(std::size_t n) const { return nodes_[n].parent == none; }

    void add_transfer(std::size_t from_node, Step step, Currency const& currency, bool must_fill,
                      std::vector<std::size_t>& next, std::vector<std::size_t>& complete)
    {
        Node const& from = nodes_[from_node];
        WalletIndex const to = step.to;
        if (root(from_node) && first_to_ && *first_to_ != to)
            return;
        if (to == receiver_) {
            if (must_fill || currency != intent_.deliver_currency)
                return;
            if (last_from_ && *last_from_ != step.from)
                return;
            // A bare XRP transfer between the two parties is a direct payment.
            if (step.kind == HopKind::xrp_transfer && root(from_node))
                return;
            nodes_.push_back(Node{from_node, step, to, currency, from.transfers + 1, false});
            complete.push_back(nodes_.size() - 1);
            return;
        }
        if (on_path(from_node, to))
            return;
        int const remaining = intent_.max_hops - (from.transfers + 1);
        if (remaining <= 0)
            return;
        if (lower_bound(to, currency, must_fill) > remaining)
            return;
        nodes_.push_back(Node{from_node, step, to, currency, from.transfers + 1, must_fill});
        next.push_back(nodes_.size() - 1);
    }

    void expand(std::size_t n, std::vector<std::size_t>& layer, std::vector<std::size_t>& next,
                std::vector<std::size_t>& complete)
    {
        Node const node = nodes_[n];
        WalletIndex const w = node.at;
        bool const arrived_by_link = !root(n) && (node.step.kind == HopKind::link_increase ||
                                                  node.step.kind == HopKind::link_decrease);
        bool const arrived_by_offer = !root(n) && node.step.kind == HopKind::offer_consume;

        // Fill one of this wallet's own offers.
        if (!root(n) && !arrived_by_offer && w != sender_ && w != receiver_) {
            for (auto o : offers_by_owner_[w]) {
                auto const& offer = s_.offers()[o];
                if (offer.takes_currency != node.currency)
                    continue;
                if (lower_bound(w, offer.gives_currency, false) > intent_.max_hops - node.transfers)
                    continue;
                nodes_.push_back(Node{n, Step{HopKind::offer_consume, w, w, o}, w, offer.gives_currency,
                                      node.transfers, false});
                layer.push_back(nodes_.size() - 1);
            }
        }
        if (node.must_fill)
            return;

        if (node.currency.is_xrp()) {
            if (w == sender_ && !s_.wallet(w).xrp.is_positive())
                return;
            if (intent_.deliver_currency.is_xrp())
                add_transfer(n, Step{HopKind::xrp_transfer, w, receiver_, none}, node.currency, false, next, complete);
            for (auto m : xrp_takers_) {
                if (m == w || m == receiver_)
                    continue;
                add_transfer(n, Step{HopKind::xrp_transfer, w, m, none}, node.currency, true, next, complete);
            }
            return;
        }

        for (LinkIndex l : s_.incident(w)) {
            auto const& link = s_.links()[l];
            if (link.currency != node.currency)
                continue;
            auto const [d, c] = s_.endpoints(l);
            bool const increase = d == w;
            WalletIndex const other = increase ? c : d;
            if (increase) {
                if (link.limit.is_bounded() && link.balance >= link.limit.bound())
                    continue;
            } else if (!link.balance.is_positive()) {
                continue;
            }
            if (arrived_by_link) {
                LinkIndex const in = node.step.ref;
                Side const in_side = s_.endpoints(in).first == w ? Side::debtor : Side::creditor;
                Side const out_side = increase ? Side::debtor : Side::creditor;
                if (effective_no_ripple(s_, in, in_side) || effective_no_ripple(s_, l, out_side))
                    continue;
            }
            add_transfer(n, Step{increase ? HopKind::link_increase : HopKind::link_decrease, w, other, l},
                         node.currency, false, next, complete);
        }
    }

    std::vector<Step> unwind(std::size_t n) const
    {
        std::vector<Step> steps;
        for (; !root(n); n = nodes_[n].parent)
            steps.push_back(nodes_[n].step);
        std::reverse(steps.begin(), steps.end());
        return steps;
    }

    auto step_key(Step const& s) const
    {
        std::uint32_t const rank = s.kind == HopKind::offer_consume ? offer_rank_[s.ref] : 0;
        std::string const* currency = s.kind == HopKind::offer_consume ? &s_.offers()[s.ref].gives_currency.str()
                                      : s.kind == HopKind::xrp_transfer ? &xrp_code_
                                                                        : &s_.links()[s.ref].currency.str();
        return std::make_tuple(s.to, std::cref(*currency), rank, static_cast<int>(s.kind));
    }

    bool path_less(std::vector<Step> const& a, std::vector<Step> const& b) const
    {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                            [&](Step const& x, Step const& y) { return step_key(x) < step_key(y); });
    }

    // Breadth-first distances over the undirected link graph give a lower
    // bound on the transfers still needed.
    void compute_bounds()
    {
        SimpleGraph const graph(s_);
        auto bfs = [&](std::vector<WalletIndex> const& sources) {
            std::vector<int> dist(s_.wallet_count(), unreachable);
            std::deque<WalletIndex> queue;
            for (auto v : sources) {
                dist[v] = 0;
                queue.push_back(v);
            }
            while (!queue.empty()) {
                auto const v = queue.front();
                queue.pop_front();
                for (auto u : graph.neighbors(v)) {
                    if (dist[u] == unreachable) {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            return dist;
        };
        to_receiver_ = bfs({receiver_});
        xrp_bound_ = unreachable;
        if (intent_.deliver_currency.is_xrp())
            xrp_bound_ = 1;
        for (auto m : xrp_takers_) {
            if (to_receiver_[m] != unreachable)
                xrp_bound_ = std::min(xrp_bound_, 1 + to_receiver_[m]);
        }
        std::vector<WalletIndex> xrp_givers;
        for (auto const& o : s_.offers()) {
            if (o.gives_currency.is_xrp())
                xrp_givers.push_back(s_.wallet_index(o.owner));
        }
        to_xrp_giver_ = bfs(xrp_givers);
    }

    int lower_bound(WalletIndex v, Currency const& currency, bool must_fill) const
    {
        if (currency.is_xrp() && !must_fill)
            return xrp_bound_;
        int bound = to_receiver_[v];
        if (must_fill) {
            // Whatever the fill yields leaves from here.
            return 0;
        }
        if (xrp_bound_ != unreachable && to_xrp_giver_[v] != unreachable)
            bound = std::min(bound, to_xrp_giver_[v] + xrp_bound_);
        return bound;
    }

    static constexpr int unreachable = std::numeric_limits<int>::max() / 4;

    LedgerSnapshot const& s_;
    TxIntent const& intent_;
    PathSearchOptions const& options_;
    WalletIndex sender_ = 0;
    WalletIndex receiver_ = 0;
    Currency source_;
    std::optional<WalletIndex> first_to_;
    std::optional<WalletIndex> last_from_;
    std::vector<std::uint32_t> offer_rank_;
    std::vector<std::vector<std::uint32_t>> offers_by_owner_;
    std::set<WalletIndex> xrp_takers_;
    std::vector<int> to_receiver_;
    std::vector<int> to_xrp_giver_;
    int xrp_bound_ = unreachable;
    std::string const xrp_code_ = "XRP";
    std::vector<Node> nodes_;
};

/// Most the path can deliver given the working balances.
Capacity max_deliverable(LedgerSnapshot const& s, WorkingState const& st, std::vector<Step> const& path)
{
    Capacity x;
    for (auto const& step : path) {
        switch (step.kind) {
        case HopKind::link_increase: {
            auto const& limit = s.links()[step.ref].limit;
            if (limit.is_bounded())
                x = cap_min(x, limit.bound() - st.balance[step.ref]);
            break;
        }
        case HopKind::link_decrease:
            x = cap_min(x, st.balance[step.ref]);
            break;
        case HopKind::xrp_transfer:
            if (step.from == path.front().from)
                x = cap_min(x, st.xrp[step.from]);
            break;
        case HopKind::offer_consume: {
            Amount const gives = st.gives[step.ref];
            Amount const takes = st.takes[step.ref];
            if (!gives.is_positive() || !takes.is_positive())
                return Amount{};
            x = cap_min(x, takes);
            x = min(x->scaled(gives.micros(), takes.micros(), Rounding::floor), gives);
            break;
        }
        }
    }
    return x;
}

struct StepAmounts {
    std::vector<Amount> in;   // amount moved (offer: amount taken in)
    std::vector<Amount> out;  // offer: amount given out; otherwise equal to in
};

/// Amounts needed to deliver `deliver`, walking back from the receiver.
/// Offer inputs round up so the maker never gives more than its rate allows.
StepAmounts backward(WorkingState const& st, std::vector<Step> const& path, Amount deliver)
{
    StepAmounts a{std::vector<Amount>(path.size()), std::vector<Amount>(path.size())};
    Amount y = deliver;
    for (std::size_t i = path.size(); i-- > 0;) {
        auto const& step = path[i];
        a.out[i] = y;
        if (step.kind == HopKind::offer_consume) {
            Amount const gives = st.gives[step.ref];
            Amount const takes = st.takes[step.ref];
            y = y == gives ? takes : y.scaled(takes.micros(), gives.micros(), Rounding::ceil);
        }
        a.in[i] = y;
    }
    return a;
}

/// Amounts produced by spending `spend` at the source, walking forward.
StepAmounts forward(WorkingState const& st, std::vector<Step> const& path, Amount spend)
{
    StepAmounts a{std::vector<Amount>(path.size()), std::vector<Amount>(path.size())};
    Amount x = spend;
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto const& step = path[i];
        a.in[i] = x;
        if (step.kind == HopKind::offer_consume) {
            Amount const gives = st.gives[step.ref];
            Amount const takes = st.takes[step.ref];
            x = x == takes ? gives : x.scaled(gives.micros(), takes.micros(), Rounding::floor);
        }
        a.out[i] = x;
    }
    return a;
}

void apply(LedgerSnapshot const& s, WorkingState& st, std::vector<Step> const& path, StepAmounts const& a)
{
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto const& step = path[i];
        switch (step.kind) {
        case HopKind::link_increase: {
            st.balance[step.ref] += a.in[i];
            auto const& limit = s.links()[step.ref].limit;
            if (limit.is_bounded() && st.balance[step.ref] > limit.bound())
                throw Error(ErrorKind::limit_breach, "link above its limit after settlement");
            break;
        }
        case HopKind::link_decrease:
            st.balance[step.ref] -= a.in[i];
            if (st.balance[step.ref].is_negative())
                throw Error(ErrorKind::limit_breach, "link below zero after settlement");
            break;
        case HopKind::xrp_transfer:
            st.xrp[step.from] -= a.in[i];
            st.xrp[step.to] += a.in[i];
            if (st.xrp[step.from].is_negative())
                throw Error(ErrorKind::insufficient_xrp, "XRP balance would go negative");
            break;
        case HopKind::offer_consume:
            st.takes[step.ref] -= a.in[i];
            st.gives[step.ref] -= a.out[i];
            if (st.takes[step.ref].is_negative() || st.gives[step.ref].is_negative())
                throw Error(ErrorKind::limit_breach, "offer overfilled");
            break;
        }
    }
}

void record(LedgerSnapshot const& s, Transaction& tx, std::vector<Step> const& path, StepAmounts const& a, int path_no)
{
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto const& step = path[i];
        PathHop hop;
        hop.kind = step.kind;
        hop.from = s.wallet(step.from).id;
        hop.to = s.wallet(step.to).id;
        hop.amount = a.in[i];
        hop.path = path_no;
        switch (step.kind) {
        case HopKind::link_increase:
        case HopKind::link_decrease:
            hop.currency = s.links()[step.ref].currency;
            break;
        case HopKind::xrp_transfer:
            hop.currency = Currency::xrp();
            break;
        case HopKind::offer_consume: {
            auto const& offer = s.offers()[step.ref];
            hop.currency = offer.takes_currency;
            hop.offer_id = offer.id;
            hop.out_currency = offer.gives_currency;
            hop.out_amount = a.out[i];
            break;
        }
        }
        tx.hops.push_back(std::move(hop));
    }
}

std::vector<PathHop> describe(LedgerSnapshot const& s, std::vector<Step> const& path)
{
    Transaction scratch;
    StepAmounts zero{std::vector<Amount>(path.size()), std::vector<Amount>(path.size())};
    record(s, scratch, path, zero, 0);
    return scratch.hops;
}

int transfer_count(std::vector<Step> const& path)
{
    return static_cast<int>(
        std::count_if(path.begin(), path.end(), [](Step const& s) { return s.kind != HopKind::offer_consume; }));
}

LedgerSnapshot materialize(LedgerSnapshot const& s, WorkingState const& st)
{
    auto parts = s.to_parts();
    for (std::size_t i = 0; i < parts.links.size(); ++i)
        parts.links[i].balance = st.balance[i];
    for (std::size_t i = 0; i < parts.wallets.size(); ++i)
        parts.wallets[i].xrp = st.xrp[i];
    std::vector<ExchangeOffer> offers;
    for (std::size_t i = 0; i < parts.offers.size(); ++i) {
        if (!st.gives[i].is_positive() || !st.takes[i].is_positive())
            continue;
        auto offer = parts.offers[i];
        offer.gives_amount = st.gives[i];
        offer.takes_amount = st.takes[i];
        offers.push_back(std::move(offer));
    }
    parts.offers = std::move(offers);
    return LedgerSnapshot::make(std::move(parts));
}

void check_intent(LedgerSnapshot const& snapshot, TxIntent const& intent)
{
    snapshot.wallet_index(intent.sender);
    snapshot.wallet_index(intent.receiver);
    if (!intent.deliver_amount.is_positive())
        throw Error(ErrorKind::invalid_amount, "deliver amount must be positive");
    if (intent.max_hops <= 0)
        throw Error(ErrorKind::invalid_amount, "max_hops must be positive");
    if (intent.deliver_currency.is_xrp() && intent.source_currency().is_xrp())
        throw Error(ErrorKind::no_path, "direct XRP payments are not path-based settlements");
}

}  // namespace

std::vector<CandidatePath> find_paths(LedgerSnapshot const& snapshot, TxIntent const& intent,
                                      PathSearchOptions const& options)
{
    check_intent(snapshot, intent);
    PathSearch search(snapshot, intent, options);
    auto const paths = search.run();
    if (paths.empty())
        throw Error(ErrorKind::no_path,
                    "no path from " + intent.sender.str() + " to " + intent.receiver.str() + " within " +
                        std::to_string(intent.max_hops) + " hops");
    WorkingState const state(snapshot);
    std::vector<CandidatePath> out;
    for (auto const& p : paths) {
        CandidatePath c;
        c.hops = describe(snapshot, p);
        c.transfers = transfer_count(p);
        auto const cap = max_deliverable(snapshot, state, p);
        c.capacity = cap ? *cap : Amount::from_micros(std::numeric_limits<std::int64_t>::max());
        out.push_back(std::move(c));
    }
    return out;
}

Execution execute_transaction(LedgerSnapshot const& snapshot, TxIntent const& intent, std::optional<Timestamp> at,
                              PathSearchOptions const& options)
{
    check_intent(snapshot, intent);
    PathSearch search(snapshot, intent, options);
    auto const paths = search.run();
    if (paths.empty())
        throw Error(ErrorKind::no_path, "no path from " + intent.sender.str() + " to " + intent.receiver.str());

    WorkingState state(snapshot);
    Transaction tx;
    tx.timestamp = at.value_or(snapshot.timestamp());
    tx.sender = intent.sender;
    tx.receiver = intent.receiver;
    tx.currency = intent.deliver_currency;
    tx.source_currency = intent.source_currency();

    Amount remaining = intent.deliver_amount;
    int used = 0;
    for (auto const& path : paths) {
        if (remaining.is_zero())
            break;
        auto const cap = max_deliverable(snapshot, state, path);
        Amount const take = cap ? min(*cap, remaining) : remaining;
        if (!take.is_positive())
            continue;
        auto const amounts = backward(state, path, take);
        apply(snapshot, state, path, amounts);
        record(snapshot, tx, path, amounts, used++);
        tx.source_amount += amounts.in.front();
        tx.amount += take;
        remaining -= take;
    }
    if (remaining.is_positive())
        throw Error(ErrorKind::no_path, "paths from " + intent.sender.str() + " to " + intent.receiver.str() +
                                            " can carry only " + tx.amount.to_string() + " of " +
                                            intent.deliver_amount.to_string() + " " + intent.deliver_currency.str());
    if (intent.max_source && tx.source_amount > intent.max_source->amount)
        throw Error(ErrorKind::source_cap_exceeded, "needs " + tx.source_amount.to_string() + " " +
                                                        tx.source_currency.str() + ", cap is " +
                                                        intent.max_source->amount.to_string());
    finalize_transaction(tx);
    return Execution{materialize(snapshot, state), std::move(tx)};
}

Execution execute_circular_xrp(LedgerSnapshot const& snapshot, WalletId const& wallet, Amount pay_xrp,
                               Currency const& target_currency, WalletId const& target_issuer,
                               std::optional<Timestamp> at, int max_hops, PathSearchOptions const& options)
{
    if (!pay_xrp.is_positive())
        throw Error(ErrorKind::invalid_amount, "XRP amount must be positive");
    if (target_currency.is_xrp())
        throw Error(ErrorKind::invalid_amount, "target currency must be an issued currency");
    auto const w = snapshot.wallet_index(wallet);
    snapshot.wallet_index(target_issuer);
    if (snapshot.wallet(w).xrp < pay_xrp)
        throw Error(ErrorKind::insufficient_xrp, wallet.str() + " holds " + snapshot.wallet(w).xrp.to_string() +
                                                     " XRP, needs " + pay_xrp.to_string());

    TxIntent intent;
    intent.sender = wallet;
    intent.receiver = wallet;
    intent.deliver_amount = pay_xrp;  // placeholder; the search ignores amounts
    intent.deliver_currency = target_currency;
    intent.max_source = SourceCap{pay_xrp, Currency::xrp()};
    intent.max_hops = max_hops;
    intent.last_hop_from = target_issuer;

    PathSearch search(snapshot, intent, options);
    auto const paths = search.run();
    if (paths.empty())
        throw Error(ErrorKind::no_path, "no offer chain from XRP to " + target_currency.str() + " issued by " +
                                            target_issuer.str());

    WorkingState state(snapshot);
    Transaction tx;
    tx.timestamp = at.value_or(snapshot.timestamp());
    tx.sender = wallet;
    tx.receiver = wallet;
    tx.currency = target_currency;
    tx.source_currency = Currency::xrp();

    Amount remaining = pay_xrp;
    int used = 0;
    for (auto const& path : paths) {
        if (remaining.is_zero())
            break;
        auto const cap = max_deliverable(snapshot, state, path);
        Amount spend = remaining;
        if (cap) {
            if (!cap->is_positive())
                continue;
            spend = min(spend, backward(state, path, *cap).in.front());
        }
        auto const amounts = forward(state, path, spend);
        if (!amounts.out.back().is_positive())
            continue;
        apply(snapshot, state, path, amounts);
        record(snapshot, tx, path, amounts, used++);
        tx.source_amount += spend;
        tx.amount += amounts.out.back();
        remaining -= spend;
    }
    if (remaining.is_positive())
        throw Error(ErrorKind::no_path, "offers can absorb only " + tx.source_amount.to_string() + " of " +
                                            pay_xrp.to_string() + " XRP");
    finalize_transaction(tx);
    return Execution{materialize(snapshot, state), std::move(tx)};
}

std::vector<std::pair<std::pair<WalletId, Currency>, Amount>> position_changes(LedgerSnapshot const& before,
                                                                              LedgerSnapshot const& after)
{
    std::map<std::pair<WalletId, Currency>, Amount> delta;
    auto accumulate = [&](LedgerSnapshot const& s, bool add) {
        for (auto const& l : s.links()) {
            Amount const b = add ? l.balance : -l.balance;
            delta[{l.creditor, l.currency}] += b;
            delta[{l.debtor, l.currency}] -= b;
        }
        for (auto const& w : s.wallets())
            delta[{w.id, Currency::xrp()}] += add ? w.xrp : -w.xrp;
    };
    accumulate(after, true);
    accumulate(before, false);
    std::vector<std::pair<std::pair<WalletId, Currency>, Amount>> out;
    for (auto const& [key, value] : delta) {
        if (!value.is_zero())
            out.emplace_back(key, value);
    }
    return out;
}

}  // namespace creditnet
