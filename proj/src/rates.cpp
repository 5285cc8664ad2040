#include "creditnet/rates.hpp"

#include "creditnet/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace creditnet {

namespace {

std::vector<std::string> split_csv(std::string const& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    for (auto& f : fields) {
        auto const first = f.find_first_not_of(" \t\r");
        auto const last = f.find_last_not_of(" \t\r");
        f = first == std::string::npos ? std::string() : f.substr(first, last - first + 1);
    }
    return fields;
}

// Calls fn(fields, line) for each data row; the first row is skipped when it
// starts with `header`.
template <typename Fn>
void for_each_row(std::istream& in, std::string_view header, std::size_t columns, Fn&& fn)
{
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto fields = split_csv(text);
        if (line == 1 && !fields.empty() && fields[0] == header)
            continue;
        if (fields.size() < columns - 1 || fields.size() > columns)
            throw ParseError(line, "expected " + std::to_string(columns) + " columns");
        fields.resize(columns);
        try {
            fn(fields, line);
        } catch (ParseError const&) {
            throw;
        } catch (Error const& e) {
            if (e.kind() != ErrorKind::parse && e.kind() != ErrorKind::invalid_amount)
                throw;
            throw ParseError(line, e.what());
        }
    }
}

std::ifstream open_input(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    return in;
}

constexpr std::int64_t band_low = Rate::scale / 100 * 98;
constexpr std::int64_t band_high = Rate::scale / 100 * 102;

}  // namespace

void RateTable::set(Currency const& base, Currency const& quote, Rate rate)
{
    if (base == quote)
        throw Error(ErrorKind::invariant_violation, "rate from " + base.str() + " to itself");
    if (auto it = rates_.find({quote, base}); it != rates_.end()) {
        auto const round_trip = (rate * it->second).units();
        if (round_trip < band_low || round_trip > band_high)
            throw Error(ErrorKind::invariant_violation, base.str() + "/" + quote.str() +
                                                            " rates disagree in the two directions");
    }
    rates_[{base, quote}] = rate;
}

std::optional<Rate> RateTable::find(Currency const& base, Currency const& quote) const
{
    if (base == quote)
        return Rate::one();
    if (auto it = rates_.find({base, quote}); it != rates_.end())
        return it->second;
    if (auto it = rates_.find({quote, base}); it != rates_.end())
        return it->second.inverse();
    return std::nullopt;
}

Rate RateTable::require(Currency const& base, Currency const& quote) const
{
    if (auto r = find(base, quote))
        return *r;
    throw Error(ErrorKind::missing_rate, "no rate from " + base.str() + " to " + quote.str());
}

Amount RateTable::convert(Amount amount, Currency const& from, Currency const& to) const
{
    if (from == to)
        return amount;
    return require(from, to).apply(amount);
}

RateTable read_rate_table(std::istream& in)
{
    RateTable table;
    for_each_row(in, "base", 4, [&](std::vector<std::string> const& f, std::size_t) {
        table.set(Currency(f[0]), Currency(f[1]), Rate::parse(f[2]));
        if (!f[3].empty()) {
            auto const t = parse_timestamp(f[3]);
            if (!table.timestamp || *table.timestamp < t)
                table.timestamp = t;
        }
    });
    return table;
}

RateTable load_rate_table(std::filesystem::path const& path)
{
    auto in = open_input(path);
    return read_rate_table(in);
}

void RateSeries::add(RateSample sample)
{
    if (sample.base == sample.quote)
        throw Error(ErrorKind::invariant_violation, "rate from " + sample.base.str() + " to itself");
    auto& points = series_[{sample.base, sample.quote}];
    Point const p{sample.at, sample.rate};
    auto it = std::upper_bound(points.begin(), points.end(), p.at,
                               [](Timestamp t, Point const& q) { return t < q.at; });
    // A later sample at the same instant replaces the earlier one.
    if (it != points.begin() && std::prev(it)->at == p.at)
        std::prev(it)->rate = p.rate;
    else
        points.insert(it, p);
}

std::size_t RateSeries::size() const noexcept
{
    std::size_t n = 0;
    for (auto const& [_, points] : series_)
        n += points.size();
    return n;
}

std::optional<Rate> RateSeries::lookup(Currency const& base, Currency const& quote, Timestamp at) const
{
    auto it = series_.find({base, quote});
    if (it == series_.end())
        return std::nullopt;
    auto const& points = it->second;
    auto p = std::upper_bound(points.begin(), points.end(), at, [](Timestamp t, Point const& q) { return t < q.at; });
    if (p == points.begin())
        return std::nullopt;
    --p;
    if (at - p->at > max_gap_)
        return std::nullopt;
    return p->rate;
}

std::optional<Rate> RateSeries::find(Currency const& base, Currency const& quote, Timestamp at) const
{
    if (base == quote)
        return Rate::one();
    if (auto r = lookup(base, quote, at))
        return r;
    if (auto r = lookup(quote, base, at))
        return r->inverse();
    return std::nullopt;
}

Rate RateSeries::rate_at(Currency const& base, Currency const& quote, Timestamp at) const
{
    if (auto r = find(base, quote, at))
        return *r;
    std::set<Currency> via;
    for (auto const& [pair, _] : series_) {
        via.insert(pair.first);
        via.insert(pair.second);
    }
    for (auto const& x : via) {
        if (x == base || x == quote)
            continue;
        auto const a = find(base, x, at);
        if (!a)
            continue;
        if (auto const b = find(x, quote, at))
            return *a * *b;
    }
    throw Error(ErrorKind::missing_rate, "no reference rate from " + base.str() + " to " + quote.str() + " at " +
                                             format_timestamp(at));
}

Amount RateSeries::value(Amount amount, Currency const& from, Currency const& to, Timestamp at) const
{
    if (from == to)
        return amount;
    return rate_at(from, to, at).apply(amount);
}

std::vector<Timestamp> RateSeries::instants(TimeInterval interval) const
{
    std::set<Timestamp> out;
    std::optional<Timestamp> before;
    for (auto const& [_, points] : series_) {
        for (auto const& p : points) {
            if (interval.contains(p.at))
                out.insert(p.at);
            else if (p.at <= interval.start && (!before || *before < p.at))
                before = p.at;
        }
    }
    if (before)
        out.insert(*before);
    return {out.begin(), out.end()};
}

RateSeries read_rate_series(std::istream& in, std::chrono::seconds max_gap)
{
    RateSeries series(max_gap);
    for_each_row(in, "timestamp", 4, [&](std::vector<std::string> const& f, std::size_t) {
        series.add(RateSample{parse_timestamp(f[0]), Currency(f[1]), Currency(f[2]), Rate::parse(f[3])});
    });
    return series;
}

RateSeries load_rate_series(std::filesystem::path const& path, std::chrono::seconds max_gap)
{
    auto in = open_input(path);
    return read_rate_series(in, max_gap);
}

}  // namespace creditnet
