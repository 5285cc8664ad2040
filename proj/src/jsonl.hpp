#pragma once

// Internal helpers shared by the line-delimited record readers and writers.

#include "creditnet/amount.hpp"
#include "creditnet/error.hpp"
#include "creditnet/snapshot.hpp"
#include "creditnet/types.hpp"

#include <json.hpp>

#include <functional>
#include <istream>
#include <optional>
#include <string>

namespace creditnet::jsonl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// Calls `fn(record, line_number)` for every non-blank line; throws
/// ParseError with the line number for malformed JSON or non-object lines.
void for_each_record(std::istream& in, std::function<void(json const&, std::size_t)> const& fn);

json const& require(json const& record, char const* key, std::size_t line);
std::string require_string(json const& record, char const* key, std::size_t line);
Amount require_amount(json const& record, char const* key, std::size_t line);
Amount optional_amount(json const& record, char const* key, std::size_t line, Amount fallback);
std::optional<bool> optional_bool(json const& record, char const* key, std::size_t line);
Timestamp require_timestamp(json const& record, char const* key, std::size_t line);
std::optional<Timestamp> optional_timestamp(json const& record, char const* key, std::size_t line);

/// Amount from a JSON string or number.
Amount to_amount(json const& value, std::size_t line, char const* key);

ExchangeOffer offer_from_json(json const& record, std::size_t line);
ordered_json offer_to_json(ExchangeOffer const& offer);

}  // namespace creditnet::jsonl
