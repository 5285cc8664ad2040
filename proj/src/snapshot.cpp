#include "creditnet/snapshot.hpp"

#include "creditnet/error.hpp"

#include <algorithm>
#include <tuple>

namespace creditnet {

namespace {

auto link_key(CreditLink const& l) { return std::tie(l.debtor, l.creditor, l.currency); }

std::string describe(CreditLink const& l)
{
    return l.debtor.str() + "->" + l.creditor.str() + " " + l.currency.str();
}

}  // namespace

std::string_view to_string(Role role) noexcept
{
    switch (role) {
    case Role::user: return "user";
    case Role::gateway: return "gateway";
    case Role::market_maker: return "market_maker";
    }
    return "user";
}

void validate_offer(ExchangeOffer const& offer)
{
    if (offer.id.empty())
        throw Error(ErrorKind::invariant_violation, "offer without id");
    if (!offer.gives_amount.is_positive() || !offer.takes_amount.is_positive())
        throw Error(ErrorKind::invariant_violation, "offer " + offer.id + " has non-positive amounts");
    if (offer.gives_currency == offer.takes_currency)
        throw Error(ErrorKind::invariant_violation, "offer " + offer.id + " exchanges a currency for itself");
}

LedgerSnapshot::LedgerSnapshot()
    : data_(std::make_shared<Parts const>()), index_(std::make_shared<Index const>(Index{{}, {0}, {}, {}}))
{
}

LedgerSnapshot LedgerSnapshot::make(Parts parts)
{
    auto& wallets = parts.wallets;
    std::sort(wallets.begin(), wallets.end(), [](Wallet const& a, Wallet const& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < wallets.size(); ++i) {
        if (i > 0 && wallets[i].id == wallets[i - 1].id)
            throw Error(ErrorKind::invariant_violation, "duplicate wallet " + wallets[i].id.str());
        if (wallets[i].xrp.is_negative())
            throw Error(ErrorKind::invariant_violation, "wallet " + wallets[i].id.str() + " has negative XRP");
    }
    auto lookup = [&](WalletId const& id) -> std::optional<WalletIndex> {
        auto it = std::lower_bound(wallets.begin(), wallets.end(), id,
                                   [](Wallet const& w, WalletId const& key) { return w.id < key; });
        if (it == wallets.end() || it->id != id)
            return std::nullopt;
        return static_cast<WalletIndex>(it - wallets.begin());
    };

    auto& links = parts.links;
    std::sort(links.begin(), links.end(),
              [](CreditLink const& a, CreditLink const& b) { return link_key(a) < link_key(b); });
    Index index;
    index.endpoints.reserve(links.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        auto const& l = links[i];
        if (i > 0 && link_key(l) == link_key(links[i - 1]))
            throw Error(ErrorKind::invariant_violation, "duplicate link " + describe(l));
        if (l.debtor == l.creditor)
            throw Error(ErrorKind::invariant_violation, "self link " + describe(l));
        if (l.currency.is_xrp())
            throw Error(ErrorKind::invariant_violation, "XRP cannot be held on a credit link: " + describe(l));
        if (l.balance.is_negative())
            throw Error(ErrorKind::invariant_violation, "negative balance on " + describe(l));
        if (l.limit.is_bounded() && l.balance > l.limit.bound())
            throw Error(ErrorKind::invariant_violation,
                        "balance " + l.balance.to_string() + " exceeds limit " + l.limit.to_string() + " on " +
                            describe(l));
        auto const d = lookup(l.debtor);
        auto const c = lookup(l.creditor);
        if (!d || !c)
            throw Error(ErrorKind::invariant_violation, "dangling endpoint on " + describe(l));
        index.endpoints.emplace_back(*d, *c);
    }

    auto& offers = parts.offers;
    std::sort(offers.begin(), offers.end(), [](ExchangeOffer const& a, ExchangeOffer const& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < offers.size(); ++i) {
        validate_offer(offers[i]);
        if (i > 0 && offers[i].id == offers[i - 1].id)
            throw Error(ErrorKind::invariant_violation, "duplicate offer " + offers[i].id);
        if (!lookup(offers[i].owner))
            throw Error(ErrorKind::invariant_violation, "offer " + offers[i].id + " has unknown owner");
    }

    auto& registry = parts.gateway_registry;
    std::sort(registry.begin(), registry.end());
    registry.erase(std::unique(registry.begin(), registry.end()), registry.end());
    // The registry is scoped to the wallets this snapshot holds.
    std::erase_if(registry, [&](WalletId const& g) { return !lookup(g); });

    // Gateways are listed explicitly; registry membership wins over owning offers.
    for (auto& w : wallets)
        w.role = Role::user;
    for (auto const& o : offers)
        wallets[*lookup(o.owner)].role = Role::market_maker;
    for (auto const& g : registry) {
        if (auto i = lookup(g))
            wallets[*i].role = Role::gateway;
    }

    std::vector<std::size_t> degree(wallets.size() + 1, 0);
    for (auto const& [d, c] : index.endpoints) {
        ++degree[d + 1];
        ++degree[c + 1];
    }
    for (std::size_t i = 1; i < degree.size(); ++i)
        degree[i] += degree[i - 1];
    index.incident_offsets = degree;
    index.incident_links.resize(degree.back());
    std::vector<std::size_t> cursor(degree.begin(), degree.end() - 1);
    for (LinkIndex i = 0; i < index.endpoints.size(); ++i) {
        auto const [d, c] = index.endpoints[i];
        index.incident_links[cursor[d]++] = i;
        index.incident_links[cursor[c]++] = i;
    }
    index.sorted_gateways = registry;

    LedgerSnapshot snapshot;
    snapshot.data_ = std::make_shared<Parts const>(std::move(parts));
    snapshot.index_ = std::make_shared<Index const>(std::move(index));
    return snapshot;
}

std::optional<WalletIndex> LedgerSnapshot::find_wallet(WalletId const& id) const
{
    auto const& wallets = data_->wallets;
    auto it = std::lower_bound(wallets.begin(), wallets.end(), id,
                               [](Wallet const& w, WalletId const& key) { return w.id < key; });
    if (it == wallets.end() || it->id != id)
        return std::nullopt;
    return static_cast<WalletIndex>(it - wallets.begin());
}

WalletIndex LedgerSnapshot::wallet_index(WalletId const& id) const
{
    if (auto i = find_wallet(id))
        return *i;
    throw Error(ErrorKind::unknown_wallet, "wallet " + id.str() + " is not in the snapshot");
}

bool LedgerSnapshot::is_gateway(WalletId const& id) const
{
    return std::binary_search(index_->sorted_gateways.begin(), index_->sorted_gateways.end(), id);
}

std::optional<LinkIndex> LedgerSnapshot::find_link(WalletId const& debtor, WalletId const& creditor,
                                                   Currency const& currency) const
{
    auto const& links = data_->links;
    auto const key = std::tie(debtor, creditor, currency);
    auto it = std::lower_bound(links.begin(), links.end(), key,
                               [](CreditLink const& l, auto const& k) { return link_key(l) < k; });
    if (it == links.end() || link_key(*it) != key)
        return std::nullopt;
    return static_cast<LinkIndex>(it - links.begin());
}

std::span<LinkIndex const> LedgerSnapshot::incident(WalletIndex w) const
{
    auto const& offsets = index_->incident_offsets;
    auto const begin = offsets[w];
    auto const end = offsets[w + 1];
    return std::span<LinkIndex const>(index_->incident_links.data() + begin, end - begin);
}

bool operator==(LedgerSnapshot const& a, LedgerSnapshot const& b)
{
    auto const& x = a.parts();
    auto const& y = b.parts();
    return x.timestamp == y.timestamp && x.wallets == y.wallets && x.links == y.links && x.offers == y.offers &&
           x.gateway_registry == y.gateway_registry;
}

}  // namespace creditnet
