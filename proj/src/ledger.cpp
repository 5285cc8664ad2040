#include "creditnet/ledger.hpp"

#include "creditnet/error.hpp"
#include "creditnet/graph.hpp"

namespace creditnet {

bool effective_no_ripple(LedgerSnapshot const& snapshot, LinkIndex link, Side side)
{
    auto const [d, c] = snapshot.endpoints(link);
    Wallet const& owner = snapshot.wallet(side == Side::debtor ? d : c);
    if (owner.default_ripple)
        return false;
    return snapshot.links()[link].no_ripple(side).value_or(false);
}

LedgerSnapshot normalize_flags(LedgerSnapshot const& snapshot)
{
    auto parts = snapshot.to_parts();
    for (LinkIndex i = 0; i < parts.links.size(); ++i) {
        auto& link = parts.links[i];
        link.no_ripple_debtor = effective_no_ripple(snapshot, i, Side::debtor);
        link.no_ripple_creditor = effective_no_ripple(snapshot, i, Side::creditor);
    }
    return LedgerSnapshot::make(std::move(parts));
}

LedgerSnapshot induced_subsnapshot(LedgerSnapshot const& snapshot, std::span<std::uint8_t const> keep)
{
    auto const& src = snapshot.parts();
    LedgerSnapshot::Parts out;
    out.timestamp = src.timestamp;
    for (WalletIndex i = 0; i < src.wallets.size(); ++i) {
        if (keep[i])
            out.wallets.push_back(src.wallets[i]);
    }
    for (LinkIndex i = 0; i < src.links.size(); ++i) {
        auto const [d, c] = snapshot.endpoints(i);
        if (keep[d] && keep[c])
            out.links.push_back(src.links[i]);
    }
    for (auto const& offer : src.offers) {
        if (keep[snapshot.wallet_index(offer.owner)])
            out.offers.push_back(offer);
    }
    out.gateway_registry = src.gateway_registry;
    return LedgerSnapshot::make(std::move(out));
}

LedgerSnapshot largest_connected_component(LedgerSnapshot const& snapshot)
{
    if (snapshot.empty())
        throw Error(ErrorKind::empty_snapshot, "snapshot has no wallets");
    SimpleGraph const graph(snapshot);
    auto const components = connected_components(graph);
    if (components.sizes.size() == 1)
        return snapshot;
    // Wallets are sorted by id and labels follow the smallest member, so the
    // lowest label among equal sizes holds the smallest id.
    auto const target = components.largest();
    Mask keep(snapshot.wallet_count());
    for (std::size_t i = 0; i < keep.size(); ++i)
        keep[i] = components.label[i] == target;
    return induced_subsnapshot(snapshot, keep);
}

}  // namespace creditnet
