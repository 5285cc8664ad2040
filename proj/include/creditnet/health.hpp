#pragma once

#include "creditnet/liquidity.hpp"
#include "creditnet/rates.hpp"
#include "creditnet/settlement.hpp"
#include "creditnet/snapshot.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace creditnet {

struct ProneCurrency {
    Currency currency;
    /// Counterparties of the links on which the wallet allows rippling.
    std::vector<WalletId> counterparties;
};

struct ProneWallet {
    WalletId wallet;
    std::vector<ProneCurrency> currencies;
};

struct RipplingRiskReport {
    Currency target;
    std::vector<ProneWallet> prone;  // by id
    /// Balances on rippling-enabled links that prone wallets hold with
    /// registered gateways, in currencies where they are prone.
    Amount credit_at_risk;
    /// limit - balance over prone wallets' rippling-enabled bounded links in
    /// those currencies.
    Amount limit_gap_exposure;
    std::size_t gateway_links = 0;
};

/// Wallets outside the gateway registry with at least two rippling-enabled
/// links in one currency. Throws MissingRate.
RipplingRiskReport rippling_risk_scan(LedgerSnapshot const& snapshot, RateTable const& rates, Currency const& target);

enum class DisruptionCriterion { degree, tx_frequency };

std::string_view to_string(DisruptionCriterion c) noexcept;
DisruptionCriterion parse_disruption_criterion(std::string_view text);

struct RankedWallet {
    WalletId wallet;
    std::size_t score = 0;
};

/// Top `k` wallets (fewer if the snapshot is smaller), highest score first,
/// ties by id. tx_frequency counts distinct transactions a wallet takes part
/// in as sender, receiver or intermediary. Throws MissingTxLog.
std::vector<RankedWallet> select_disruptive(LedgerSnapshot const& snapshot,
                                            std::optional<std::span<Transaction const>> txlog, std::size_t k,
                                            DisruptionCriterion criterion);

struct ResilienceRecord {
    std::size_t initial_wallets = 0;
    std::size_t initial_lcc = 0;
    std::vector<WalletId> removed;
    std::vector<std::size_t> lcc_sizes;  // after each removal
    /// (remaining / 2) / lcc; NaN once nothing is left.
    std::vector<double> rsl_factors;
};

/// Removes wallets cumulatively in order. Throws UnknownWallet, ConfigError on
/// a repeated id.
ResilienceRecord removal_analysis(LedgerSnapshot const& snapshot, std::span<WalletId const> order);

/// `removals,lcc_size` with a row for zero removals.
std::string resilience_csv(ResilienceRecord const& record);

enum class StuckReason { no_rippling, rippling_no_tx };

std::string_view to_string(StuckReason r) noexcept;

struct StuckLink {
    WalletId wallet;
    Currency currency;
    Amount balance;
    Amount movable;  // max-flow out through the gateway, capped at the balance
    Amount stuck_converted;  // zero unless stuck
    std::optional<StuckReason> reason;  // nullopt: the balance can be moved
};

struct StuckCreditReport {
    WalletId gateway;
    Currency target;
    std::vector<WalletId> wallets_no_rippling;
    std::vector<WalletId> wallets_rippling_no_tx;
    std::vector<StuckLink> links;  // every positive-balance link the gateway owes on
    Amount stuck_total;
};

/// Maximum amount `wallet` can push out through the gateway side of `link`
/// (on which the gateway is debtor and `wallet` creditor) to any other wallet,
/// honouring every intermediary's rippling flags.
Amount drainable_through(LedgerSnapshot const& snapshot, LinkIndex link);

/// Throws NotAGateway, MissingRate.
StuckCreditReport stuck_credit(LedgerSnapshot const& snapshot, WalletId const& gateway, RateTable const& rates,
                               Currency const& target);

struct AcquisitionClass {
    std::size_t count = 0;
    Amount received;  // target currency
    std::vector<std::string> tx_ids;
};

struct CreditAcquisitionReport {
    WalletId gateway;
    Currency target;
    TimeInterval window;
    AcquisitionClass inbound;
    AcquisitionClass circular;
    /// What circular transactions paid, per source currency.
    std::map<Currency, Amount> circular_paid;
    /// Target units per XRP over circular transactions paid in XRP: mean of
    /// per-transaction rates, and total received over total paid.
    std::optional<double> simple_rate;
    std::optional<double> weighted_rate;
};

/// Classifies transactions in `window` that raise a victim's balance on a
/// link the gateway owes on. Throws EmptyWindow, MissingRate.
CreditAcquisitionReport credit_acquisition(std::span<Transaction const> txlog, std::span<WalletId const> victims,
                                           WalletId const& gateway, RateTable const& rates, Currency const& target,
                                           TimeInterval window);

}  // namespace creditnet
