#pragma once

#include "creditnet/rates.hpp"
#include "creditnet/settlement.hpp"
#include "creditnet/snapshot.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace creditnet {

struct ClassificationReport {
    std::size_t input = 0;
    std::size_t pruned_unknown_endpoint = 0;
    std::size_t pruned_direct_xrp = 0;
    std::size_t pruned_anomalous = 0;
    std::size_t classified = 0;

    std::size_t circular = 0;
    std::size_t circular_cross_currency = 0;
    std::size_t cross_currency_noncircular = 0;
    std::size_t offers_used = 0;  // transactions filling at least one offer
    std::size_t intermediaries_0 = 0;
    std::size_t intermediaries_1 = 0;
    std::size_t intermediaries_2plus = 0;
    std::size_t involving_xrp = 0;
    std::size_t not_involving_xrp = 0;
};

/// True for transactions to discard as anomalous.
using AnomalyPredicate = std::function<bool(Transaction const&)>;

/// XRP paid and delivered with no offer filled.
bool is_direct_xrp(Transaction const& tx);

/// Drops transactions whose sender or receiver is not in the snapshot, then
/// direct XRP payments, then those `anomalous` flags; buckets the rest.
ClassificationReport classify_transactions(std::span<Transaction const> txlog, LedgerSnapshot const& snapshot,
                                           AnomalyPredicate const& anomalous = {});

/// Reference value of what the receiver got minus that of what the sender
/// paid, at the transaction's instant. Positive: the taker gained.
/// Throws NotCrossCurrency, MissingRate.
Amount stale_gain(Transaction const& tx, RateSeries const& rates, Currency const& reference = Currency("USD"));

/// Offer records with an observation instant (created_at when absent),
/// sorted by (observed_at, id).
std::vector<ExchangeOffer> read_offer_history(std::istream& in);
std::vector<ExchangeOffer> load_offer_history(std::filesystem::path const& path);

struct OfferExposure {
    ExchangeOffer offer;  // last observation in the window
    Amount at_risk;       // max(0, value(gives) - value(takes)) at observation
    Amount realized;      // taker gains on this offer's fills in the window
    std::size_t fills = 0;
};

struct ExploitRecord {
    WalletId wallet;
    Amount gain;
    std::vector<std::string> tx_ids;
};

struct RatePoint {
    Timestamp at;
    std::string tx_id;
    /// Units of the pair's second currency per unit of the first.
    double tx_rate = 0;
    double reference_rate = 0;
    Currency paid;  // which leg the taker gave
    Amount gain;
};

struct StaleOfferReport {
    TimeInterval window;
    std::pair<Currency, Currency> pair;
    Currency reference;
    Amount at_risk_total;
    std::vector<OfferExposure> offers;    // maker-losing offers, by id
    std::vector<ExploitRecord> exploits;  // positive gains, by wallet
    std::vector<RatePoint> points;        // by time, then id
};

/// Throws EmptyWindow, MissingRate.
StaleOfferReport stale_offer_report(std::span<Transaction const> txlog, std::span<ExchangeOffer const> offer_history,
                                    RateSeries const& rates, std::pair<Currency, Currency> const& pair,
                                    TimeInterval window, Currency const& reference = Currency("USD"));

/// `timestamp,tx_rate,reference_rate,side`
std::string rate_points_csv(StaleOfferReport const& report);

}  // namespace creditnet
