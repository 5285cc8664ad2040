#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace creditnet {

enum class ErrorKind {
    parse,
    invariant_violation,
    empty_snapshot,
    config,
    not_incident,
    no_path,
    limit_breach,
    source_cap_exceeded,
    insufficient_xrp,
    invalid_amount,
    disconnected,
    convergence_failure,
    empty_result,
    missing_rate,
    mixed_currency,
    node_missing,
    not_enough_pairs,
    missing_tx_log,
    unknown_wallet,
    not_a_gateway,
    empty_window,
    not_cross_currency,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All domain failures surface as this exception; the kind drives CLI exit
// codes and lets tests assert on the precise failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string const& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string const& message)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace creditnet
