#include "creditnet/offers.hpp"

#include "creditnet/error.hpp"
#include "jsonl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace creditnet {

bool is_direct_xrp(Transaction const& tx)
{
    return tx.currency.is_xrp() && tx.source_currency.is_xrp() && tx.offers_used == 0;
}

ClassificationReport classify_transactions(std::span<Transaction const> txlog, LedgerSnapshot const& snapshot,
                                           AnomalyPredicate const& anomalous)
{
    ClassificationReport r;
    r.input = txlog.size();
    for (auto const& tx : txlog) {
        if (!snapshot.find_wallet(tx.sender) || !snapshot.find_wallet(tx.receiver)) {
            ++r.pruned_unknown_endpoint;
            continue;
        }
        if (is_direct_xrp(tx)) {
            ++r.pruned_direct_xrp;
            continue;
        }
        if (anomalous && anomalous(tx)) {
            ++r.pruned_anomalous;
            continue;
        }
        ++r.classified;
        if (tx.circular) {
            ++r.circular;
            if (tx.cross_currency)
                ++r.circular_cross_currency;
        } else if (tx.cross_currency) {
            ++r.cross_currency_noncircular;
        }
        if (tx.offers_used > 0)
            ++r.offers_used;
        if (tx.intermediaries == 0)
            ++r.intermediaries_0;
        else if (tx.intermediaries == 1)
            ++r.intermediaries_1;
        else
            ++r.intermediaries_2plus;
        if (tx.involves_xrp())
            ++r.involving_xrp;
        else
            ++r.not_involving_xrp;
    }
    return r;
}

Amount stale_gain(Transaction const& tx, RateSeries const& rates, Currency const& reference)
{
    if (tx.currency == tx.source_currency)
        throw Error(ErrorKind::not_cross_currency, "transaction " + tx.id + " pays and delivers " + tx.currency.str());
    return rates.value(tx.amount, tx.currency, reference, tx.timestamp) -
           rates.value(tx.source_amount, tx.source_currency, reference, tx.timestamp);
}

std::vector<ExchangeOffer> read_offer_history(std::istream& in)
{
    std::vector<ExchangeOffer> history;
    jsonl::for_each_record(in, [&](jsonl::json const& record, std::size_t line) {
        if (auto it = record.find("kind"); it != record.end() && *it != "offer")
            throw ParseError(line, "expected offer records");
        auto offer = jsonl::offer_from_json(record, line);
        if (!offer.observed_at)
            offer.observed_at = offer.created_at;
        history.push_back(std::move(offer));
    });
    std::stable_sort(history.begin(), history.end(), [](ExchangeOffer const& a, ExchangeOffer const& b) {
        return std::tie(*a.observed_at, a.id) < std::tie(*b.observed_at, b.id);
    });
    return history;
}

std::vector<ExchangeOffer> load_offer_history(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    return read_offer_history(in);
}

namespace {

bool in_pair(Currency const& a, Currency const& b, std::pair<Currency, Currency> const& pair)
{
    return (a == pair.first && b == pair.second) || (a == pair.second && b == pair.first);
}

double ratio(Amount num, Amount den)
{
    return static_cast<double>(num.micros()) / static_cast<double>(den.micros());
}

}  // namespace

StaleOfferReport stale_offer_report(std::span<Transaction const> txlog, std::span<ExchangeOffer const> offer_history,
                                    RateSeries const& rates, std::pair<Currency, Currency> const& pair,
                                    TimeInterval window, Currency const& reference)
{
    if (!(window.start < window.end))
        throw Error(ErrorKind::empty_window, "window " + format_timestamp(window.start) + " to " +
                                                 format_timestamp(window.end) + " is empty");
    StaleOfferReport report;
    report.window = window;
    report.pair = pair;
    report.reference = reference;

    // Last observation of each offer inside the window.
    std::map<std::string, OfferExposure> exposures;
    for (auto const& o : offer_history) {
        auto const at = o.observed_at.value_or(o.created_at);
        if (!window.contains(at) || !in_pair(o.gives_currency, o.takes_currency, pair))
            continue;
        auto& e = exposures[o.id];
        if (!e.offer.observed_at || *e.offer.observed_at <= at) {
            e.offer = o;
            e.offer.observed_at = at;
        }
    }
    for (auto& [id, e] : exposures) {
        auto const at = *e.offer.observed_at;
        auto const loss = rates.value(e.offer.gives_amount, e.offer.gives_currency, reference, at) -
                          rates.value(e.offer.takes_amount, e.offer.takes_currency, reference, at);
        e.at_risk = std::max(loss, Amount{});
    }

    std::map<WalletId, ExploitRecord> exploits;
    for (auto const& tx : txlog) {
        if (!window.contains(tx.timestamp) || !in_pair(tx.source_currency, tx.currency, pair))
            continue;
        RatePoint p;
        p.at = tx.timestamp;
        p.tx_id = tx.id;
        p.paid = tx.source_currency;
        p.gain = stale_gain(tx, rates, reference);
        p.tx_rate = tx.source_currency == pair.first ? ratio(tx.amount, tx.source_amount)
                                                     : ratio(tx.source_amount, tx.amount);
        p.reference_rate = rates.rate_at(pair.first, pair.second, tx.timestamp).to_double();
        report.points.push_back(p);

        if (p.gain.is_positive()) {
            auto& rec = exploits[tx.sender];
            rec.wallet = tx.sender;
            rec.gain += p.gain;
            rec.tx_ids.push_back(tx.id);
        }
        for (auto const& h : tx.hops) {
            if (h.kind != HopKind::offer_consume)
                continue;
            auto it = exposures.find(h.offer_id);
            if (it == exposures.end())
                continue;
            it->second.realized += rates.value(h.out_amount, h.out_currency, reference, tx.timestamp) -
                                   rates.value(h.amount, h.currency, reference, tx.timestamp);
            ++it->second.fills;
        }
    }

    for (auto& [id, e] : exposures) {
        if (!e.at_risk.is_positive())
            continue;
        report.at_risk_total += e.at_risk;
        report.offers.push_back(std::move(e));
    }
    for (auto& [w, rec] : exploits)
        report.exploits.push_back(std::move(rec));
    std::stable_sort(report.points.begin(), report.points.end(), [](RatePoint const& a, RatePoint const& b) {
        return std::tie(a.at, a.tx_id) < std::tie(b.at, b.tx_id);
    });
    return report;
}

std::string rate_points_csv(StaleOfferReport const& report)
{
    std::ostringstream out;
    out.precision(12);
    out << "timestamp,tx_rate,reference_rate,side\n";
    for (auto const& p : report.points)
        out << format_timestamp(p.at) << ',' << p.tx_rate << ',' << p.reference_rate << ",pays_" << p.paid.str()
            << '\n';
    return out.str();
}

}  // namespace creditnet
