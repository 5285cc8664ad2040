#pragma once

#include "creditnet/amount.hpp"
#include "creditnet/types.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace creditnet {

/// Static exchange rates: one unit of `base` buys `rate` units of `quote`.
class RateTable {
public:
    /// Throws InvariantViolation when the opposite direction is present and
    /// the round trip leaves the [0.98, 1.02] band.
    void set(Currency const& base, Currency const& quote, Rate rate);

    /// Direct entry, else inverse of the opposite entry; identity for equal
    /// currencies.
    std::optional<Rate> find(Currency const& base, Currency const& quote) const;
    /// Throws MissingRate naming `base`.
    Rate require(Currency const& base, Currency const& quote) const;
    Amount convert(Amount amount, Currency const& from, Currency const& to) const;

    std::map<std::pair<Currency, Currency>, Rate> const& entries() const noexcept { return rates_; }
    std::optional<Timestamp> timestamp;

private:
    std::map<std::pair<Currency, Currency>, Rate> rates_;
};

/// CSV `base,quote,rate,timestamp`; a header line is skipped. The timestamp
/// column may be empty.
RateTable read_rate_table(std::istream& in);
RateTable load_rate_table(std::filesystem::path const& path);

struct RateSample {
    Timestamp at;
    Currency base;
    Currency quote;
    Rate rate;
};

/// Time series of reference rates. Lookups use the nearest sample at or before
/// the instant, and fail when that sample is older than `max_gap`.
class RateSeries {
public:
    explicit RateSeries(std::chrono::seconds max_gap = std::chrono::hours(24)) : max_gap_(max_gap) {}

    void add(RateSample sample);

    /// Direct or inverted sample for the pair; identity for equal currencies.
    std::optional<Rate> find(Currency const& base, Currency const& quote, Timestamp at) const;
    /// As `find`, falling back to a cross rate through one intermediate
    /// currency (first in code order that works). Throws MissingRate.
    Rate rate_at(Currency const& base, Currency const& quote, Timestamp at) const;
    Amount value(Amount amount, Currency const& from, Currency const& to, Timestamp at) const;

    /// Instants of every sample in [interval.start, interval.end) plus the last
    /// sample at or before interval.start, over all pairs, ascending.
    std::vector<Timestamp> instants(TimeInterval interval) const;

    std::chrono::seconds max_gap() const noexcept { return max_gap_; }
    std::size_t size() const noexcept;

private:
    struct Point {
        Timestamp at;
        Rate rate;
    };
    std::optional<Rate> lookup(Currency const& base, Currency const& quote, Timestamp at) const;

    std::chrono::seconds max_gap_;
    std::map<std::pair<Currency, Currency>, std::vector<Point>> series_;
};

/// CSV `timestamp,base,quote,rate`; a header line is skipped.
RateSeries read_rate_series(std::istream& in, std::chrono::seconds max_gap = std::chrono::hours(24));
RateSeries load_rate_series(std::filesystem::path const& path,
                            std::chrono::seconds max_gap = std::chrono::hours(24));

}  // namespace creditnet
