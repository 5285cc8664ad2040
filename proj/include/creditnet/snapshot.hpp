#pragma once

#include "creditnet/amount.hpp"
#include "creditnet/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace creditnet {

enum class Role { user, gateway, market_maker };

std::string_view to_string(Role role) noexcept;

/// Which endpoint of a credit link a flag belongs to.
enum class Side { debtor, creditor };

struct Wallet {
    WalletId id;
    Amount xrp;
    bool default_ripple = false;
    Role role = Role::user;  // derived when the snapshot is built
    std::uint64_t tx_count = 0;

    friend bool operator==(Wallet const&, Wallet const&) = default;
};

/// Directed IOU: `debtor` owes `creditor` `balance` units of `currency`, up to
/// the creditor-set `limit`. Rippling flags are per endpoint; an absent flag
/// means the input did not state one.
struct CreditLink {
    WalletId debtor;
    WalletId creditor;
    Currency currency;
    Amount balance;
    Limit limit;
    std::optional<bool> no_ripple_debtor;
    std::optional<bool> no_ripple_creditor;

    bool touches(WalletId const& w) const noexcept { return debtor == w || creditor == w; }
    Side side_of(WalletId const& w) const noexcept { return debtor == w ? Side::debtor : Side::creditor; }
    WalletId const& counterparty(WalletId const& w) const noexcept { return debtor == w ? creditor : debtor; }

    std::optional<bool> const& no_ripple(Side side) const noexcept
    {
        return side == Side::debtor ? no_ripple_debtor : no_ripple_creditor;
    }
    std::optional<bool>& no_ripple(Side side) noexcept
    {
        return side == Side::debtor ? no_ripple_debtor : no_ripple_creditor;
    }

    friend bool operator==(CreditLink const&, CreditLink const&) = default;
};

/// Standing order by `owner` to give `gives_amount` of one currency in return
/// for `takes_amount` of another. Amounts are what remains unfilled.
struct ExchangeOffer {
    std::string id;
    WalletId owner;
    Currency gives_currency;
    Currency takes_currency;
    Amount gives_amount;
    Amount takes_amount;
    Timestamp created_at{};
    std::optional<Timestamp> observed_at;

    /// Units of gives_currency per unit of takes_currency.
    Rate rate() const { return Rate::ratio(gives_amount, takes_amount); }

    friend bool operator==(ExchangeOffer const&, ExchangeOffer const&) = default;
};

/// Checks field-level offer invariants; throws InvariantViolation.
void validate_offer(ExchangeOffer const& offer);

using WalletIndex = std::uint32_t;
using LinkIndex = std::uint32_t;

/// Immutable multi-currency credit network at one instant. Copies are cheap
/// and share storage; every change goes through `make`, which validates.
class LedgerSnapshot {
public:
    struct Parts {
        Timestamp timestamp{};
        std::vector<Wallet> wallets;
        std::vector<CreditLink> links;
        std::vector<ExchangeOffer> offers;
        std::vector<WalletId> gateway_registry;
    };

    LedgerSnapshot();

    /// Validates, sorts into canonical order and derives wallet roles.
    /// Throws InvariantViolation.
    static LedgerSnapshot make(Parts parts);

    Parts const& parts() const noexcept { return *data_; }
    Parts to_parts() const { return *data_; }

    Timestamp timestamp() const noexcept { return data_->timestamp; }
    std::vector<Wallet> const& wallets() const noexcept { return data_->wallets; }
    std::vector<CreditLink> const& links() const noexcept { return data_->links; }
    std::vector<ExchangeOffer> const& offers() const noexcept { return data_->offers; }
    std::vector<WalletId> const& gateway_registry() const noexcept { return data_->gateway_registry; }

    std::size_t wallet_count() const noexcept { return data_->wallets.size(); }
    std::size_t link_count() const noexcept { return data_->links.size(); }
    bool empty() const noexcept { return data_->wallets.empty(); }

    std::optional<WalletIndex> find_wallet(WalletId const& id) const;
    /// Throws UnknownWallet.
    WalletIndex wallet_index(WalletId const& id) const;
    Wallet const& wallet(WalletIndex i) const { return data_->wallets[i]; }
    Wallet const& wallet(WalletId const& id) const { return wallet(wallet_index(id)); }

    bool is_gateway(WalletId const& id) const;

    std::optional<LinkIndex> find_link(WalletId const& debtor, WalletId const& creditor,
                                       Currency const& currency) const;
    std::pair<WalletIndex, WalletIndex> endpoints(LinkIndex link) const { return index_->endpoints[link]; }
    /// Links incident to a wallet, ascending by link index.
    std::span<LinkIndex const> incident(WalletIndex w) const;

    friend bool operator==(LedgerSnapshot const& a, LedgerSnapshot const& b);

private:
    struct Index {
        std::vector<std::pair<WalletIndex, WalletIndex>> endpoints;
        std::vector<std::size_t> incident_offsets;
        std::vector<LinkIndex> incident_links;
        std::vector<WalletId> sorted_gateways;
    };

    std::shared_ptr<Parts const> data_;
    std::shared_ptr<Index const> index_;
};

}  // namespace creditnet
