#pragma once

#include "creditnet/snapshot.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace creditnet {

enum class HopKind {
    link_increase,  // along the link's direction: debtor pays creditor, balance rises
    link_decrease,  // against it: creditor pays debtor, balance falls
    offer_consume,  // owner takes `currency`, gives `out_currency`
    xrp_transfer,   // native XRP moves from `from` to `to`
};

std::string_view to_string(HopKind kind) noexcept;
HopKind parse_hop_kind(std::string_view text);

struct PathHop {
    HopKind kind = HopKind::link_increase;
    WalletId from;
    WalletId to;  // for offer_consume, from == to == owner
    Currency currency;
    Amount amount;
    // offer_consume only
    std::string offer_id;
    Currency out_currency;
    Amount out_amount;
    // index of the path within its transaction
    int path = 0;

    friend bool operator==(PathHop const&, PathHop const&) = default;
};

struct SourceCap {
    Amount amount;
    Currency currency;
};

struct TxIntent {
    WalletId sender;
    WalletId receiver;
    Amount deliver_amount;
    Currency deliver_currency;
    /// Also fixes the source currency; without it the sender pays in the
    /// delivered currency.
    std::optional<SourceCap> max_source;
    /// Wallet-to-wallet transfers per path; offer fills do not count.
    int max_hops = 6;
    /// Restricts paths to those whose first transfer goes to this wallet.
    std::optional<WalletId> first_hop_to;
    /// Restricts paths to those whose last transfer comes from this wallet.
    std::optional<WalletId> last_hop_from;

    Currency source_currency() const { return max_source ? max_source->currency : deliver_currency; }
};

struct Transaction {
    std::string id;
    Timestamp timestamp{};
    WalletId sender;
    WalletId receiver;
    Amount amount;  // delivered
    Currency currency;
    Amount source_amount;
    Currency source_currency;
    std::vector<PathHop> hops;
    int offers_used = 0;
    int intermediaries = 0;
    bool circular = false;
    bool cross_currency = false;

    bool involves_xrp() const;
};

/// Fills the derived fields (circular, cross_currency, offers_used,
/// intermediaries, id) from the others.
void finalize_transaction(Transaction& tx);

/// A candidate route; `hops` carry zero amounts. `capacity` is the most the
/// route can deliver on its own in the snapshot it was found in.
struct CandidatePath {
    std::vector<PathHop> hops;
    int transfers = 0;
    Amount capacity;
};

struct PathSearchOptions {
    /// Stop after the shortest-first layer that reaches this many paths.
    std::size_t max_candidates = 64;
    /// Bound on partial paths kept per breadth-first layer.
    std::size_t max_frontier = 200'000;
};

/// True iff both links carry the same currency and `wallet`'s own side allows
/// rippling on each (resolved as in normalize_flags). Throws NotIncident.
bool rippling_allowed(LedgerSnapshot const& snapshot, WalletId const& wallet, CreditLink const& link_a,
                      CreditLink const& link_b);

/// Routes of at most `intent.max_hops` transfers with positive residual
/// capacity on every hop, intermediates either rippling between same-currency
/// links or filling one of their own offers. Wallets are not revisited
/// (a circular route may end at its start). Ordered by transfer count, then
/// lexicographically by hop. Throws NoPath.
std::vector<CandidatePath> find_paths(LedgerSnapshot const& snapshot, TxIntent const& intent,
                                      PathSearchOptions const& options = {});

struct Execution {
    LedgerSnapshot snapshot;
    Transaction transaction;
};

/// Delivers exactly `intent.deliver_amount`, filling the candidate paths in
/// order and taking the most each can carry. Offers fill at their own rate,
/// rounded in the maker's favour. The input snapshot is untouched.
/// Throws NoPath, SourceCapExceeded, InsufficientXrp.
Execution execute_transaction(LedgerSnapshot const& snapshot, TxIntent const& intent,
                              std::optional<Timestamp> at = std::nullopt, PathSearchOptions const& options = {});

/// Circular payment: `wallet` spends exactly `pay_xrp` through offers and
/// receives the proceeds on its `target_currency` link with `target_issuer`.
/// Throws InvalidAmount, InsufficientXrp, NoPath.
Execution execute_circular_xrp(LedgerSnapshot const& snapshot, WalletId const& wallet, Amount pay_xrp,
                               Currency const& target_currency, WalletId const& target_issuer,
                               std::optional<Timestamp> at = std::nullopt, int max_hops = 6,
                               PathSearchOptions const& options = {});

/// Per-wallet, per-currency signed position change between two snapshots of
/// the same network: credit held minus credit owed, plus XRP.
std::vector<std::pair<std::pair<WalletId, Currency>, Amount>> position_changes(LedgerSnapshot const& before,
                                                                              LedgerSnapshot const& after);

}  // namespace creditnet
