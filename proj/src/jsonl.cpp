#include "jsonl.hpp"

namespace creditnet::jsonl {

namespace {

template <typename Fn>
auto rethrow_at(std::size_t line, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (ParseError const&) {
        throw;
    } catch (Error const& e) {
        throw ParseError(line, e.what());
    }
}

}  // namespace

void for_each_record(std::istream& in, std::function<void(json const&, std::size_t)> const& fn)
{
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos)
            continue;
        json record;
        try {
            record = json::parse(text);
        } catch (json::parse_error const& e) {
            throw ParseError(line, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object())
            throw ParseError(line, "record is not an object");
        fn(record, line);
    }
}

json const& require(json const& record, char const* key, std::size_t line)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        throw ParseError(line, std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(json const& record, char const* key, std::size_t line)
{
    auto const& value = require(record, key, line);
    if (!value.is_string())
        throw ParseError(line, std::string("field '") + key + "' must be a string");
    return value.get<std::string>();
}

Amount to_amount(json const& value, std::size_t line, char const* key)
{
    return rethrow_at(line, [&] {
        if (value.is_string())
            return Amount::parse(value.get<std::string>());
        if (value.is_number_integer())
            return Amount::parse(std::to_string(value.get<std::int64_t>()));
        if (value.is_number())
            return Amount::from_double(value.get<double>());
        throw ParseError(line, std::string("field '") + key + "' must be a decimal");
    });
}

Amount require_amount(json const& record, char const* key, std::size_t line)
{
    return to_amount(require(record, key, line), line, key);
}

Amount optional_amount(json const& record, char const* key, std::size_t line, Amount fallback)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return fallback;
    return to_amount(*it, line, key);
}

std::optional<bool> optional_bool(json const& record, char const* key, std::size_t line)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return std::nullopt;
    if (!it->is_boolean())
        throw ParseError(line, std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

Timestamp require_timestamp(json const& record, char const* key, std::size_t line)
{
    auto const& value = require(record, key, line);
    return rethrow_at(line, [&] {
        if (value.is_number_integer())
            return Timestamp(std::chrono::seconds(value.get<std::int64_t>()));
        if (!value.is_string())
            throw ParseError(line, std::string("field '") + key + "' must be a timestamp");
        return parse_timestamp(value.get<std::string>());
    });
}

std::optional<Timestamp> optional_timestamp(json const& record, char const* key, std::size_t line)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return std::nullopt;
    return require_timestamp(record, key, line);
}

ExchangeOffer offer_from_json(json const& record, std::size_t line)
{
    return rethrow_at(line, [&] {
        ExchangeOffer offer;
        offer.id = require_string(record, "id", line);
        offer.owner = WalletId(require_string(record, "owner", line));
        offer.gives_currency = Currency(require_string(record, "gives_currency", line));
        offer.takes_currency = Currency(require_string(record, "takes_currency", line));
        offer.gives_amount = require_amount(record, "gives", line);
        offer.takes_amount = require_amount(record, "takes", line);
        offer.created_at = optional_timestamp(record, "created_at", line).value_or(Timestamp{});
        offer.observed_at = optional_timestamp(record, "observed_at", line);
        validate_offer(offer);
        return offer;
    });
}

ordered_json offer_to_json(ExchangeOffer const& offer)
{
    ordered_json out;
    out["kind"] = "offer";
    out["id"] = offer.id;
    out["owner"] = offer.owner.str();
    out["gives_currency"] = offer.gives_currency.str();
    out["gives"] = offer.gives_amount.to_string();
    out["takes_currency"] = offer.takes_currency.str();
    out["takes"] = offer.takes_amount.to_string();
    out["created_at"] = format_timestamp(offer.created_at);
    if (offer.observed_at)
        out["observed_at"] = format_timestamp(*offer.observed_at);
    return out;
}

}  // namespace creditnet::jsonl
