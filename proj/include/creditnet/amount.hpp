#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace creditnet {

enum class Rounding { floor, ceil, half_even };

/// Exact decimal amount with six fractional digits, stored as an integer
/// count of micro-units. Parsed values are limited to 15 significant digits
/// (|value| < 10^9); arithmetic is overflow-checked over the full int64 range.
class Amount {
public:
    static constexpr std::int64_t scale = 1'000'000;
    static constexpr std::int64_t parse_limit = 1'000'000'000'000'000;  // 10^15 micros

    constexpr Amount() = default;

    static constexpr Amount from_micros(std::int64_t micros) noexcept { return Amount(micros); }
    static constexpr Amount from_units(std::int64_t units) noexcept { return Amount(units * scale); }

    /// Accepts an optional sign, digits, and up to six fractional digits.
    static Amount parse(std::string_view text);

    /// Recovers the decimal a JSON number was written as. Exact for any
    /// value with at most 15 significant digits.
    static Amount from_double(double value);

    constexpr std::int64_t micros() const noexcept { return micros_; }
    constexpr bool is_zero() const noexcept { return micros_ == 0; }
    constexpr bool is_positive() const noexcept { return micros_ > 0; }
    constexpr bool is_negative() const noexcept { return micros_ < 0; }

    double to_double() const noexcept { return static_cast<double>(micros_) / scale; }

    /// Canonical text: no exponent, no trailing fractional zeros.
    std::string to_string() const;

    Amount operator-() const;
    Amount& operator+=(Amount rhs);
    Amount& operator-=(Amount rhs);
    friend Amount operator+(Amount lhs, Amount rhs) { return lhs += rhs; }
    friend Amount operator-(Amount lhs, Amount rhs) { return lhs -= rhs; }

    friend constexpr auto operator<=>(Amount, Amount) = default;

    /// this * numerator / denominator, exact up to the final rounding step.
    Amount scaled(std::int64_t numerator, std::int64_t denominator, Rounding mode) const;

private:
    constexpr explicit Amount(std::int64_t micros) noexcept : micros_(micros) {}

    std::int64_t micros_ = 0;
};

Amount min(Amount a, Amount b) noexcept;
Amount max(Amount a, Amount b) noexcept;

/// Positive exchange rate with twelve fractional digits: one unit of the base
/// currency is worth `rate` units of the quote currency.
class Rate {
public:
    static constexpr std::int64_t scale = 1'000'000'000'000;

    constexpr Rate() = default;

    static constexpr Rate from_units(std::int64_t units) noexcept { return Rate(units); }
    static Rate parse(std::string_view text);
    static Rate from_double(double value);
    static Rate one() noexcept { return Rate(scale); }

    /// quote / base, rounded half-even.
    static Rate ratio(Amount quote, Amount base);

    constexpr std::int64_t units() const noexcept { return units_; }
    double to_double() const noexcept { return static_cast<double>(units_) / scale; }
    std::string to_string() const;

    Rate inverse() const;
    Rate operator*(Rate rhs) const;

    /// Converts an amount of the base currency into the quote currency.
    Amount apply(Amount amount, Rounding mode = Rounding::half_even) const;

    friend constexpr auto operator<=>(Rate, Rate) = default;

private:
    constexpr explicit Rate(std::int64_t units) noexcept : units_(units) {}

    std::int64_t units_ = 0;
};

/// Credit limit: either a bounded amount or the distinct UNBOUNDED sentinel.
class Limit {
public:
    Limit() = default;
    explicit Limit(Amount bound) : bound_(bound) {}

    static Limit unbounded() { return Limit(); }

    /// "inf" (any case) or a decimal amount.
    static Limit parse(std::string_view text);

    bool is_bounded() const noexcept { return bound_.has_value(); }
    Amount bound() const { return *bound_; }

    /// Room left above `balance`; nullopt when unbounded.
    std::optional<Amount> headroom(Amount balance) const;

    std::string to_string() const;

    friend bool operator==(Limit const&, Limit const&) = default;

private:
    std::optional<Amount> bound_;
};

}  // namespace creditnet
