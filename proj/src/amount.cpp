#include "creditnet/amount.hpp"

#include "creditnet/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace creditnet {

namespace {

__extension__ typedef __int128 int128;

int128 pow10(int digits)
{
    int128 result = 1;
    for (int i = 0; i < digits; ++i)
        result *= 10;
    return result;
}

// Divides with the requested rounding; denominator must be positive.
int128 divide(int128 numerator, int128 denominator, Rounding mode)
{
    int128 quotient = numerator / denominator;
    int128 remainder = numerator % denominator;
    if (remainder == 0)
        return quotient;
    // C++ division truncates toward zero; fix up per mode.
    bool const negative = numerator < 0;
    switch (mode) {
    case Rounding::floor:
        return negative ? quotient - 1 : quotient;
    case Rounding::ceil:
        return negative ? quotient : quotient + 1;
    case Rounding::half_even: {
        int128 const twice = (remainder < 0 ? -remainder : remainder) * 2;
        bool up = twice > denominator || (twice == denominator && (quotient % 2) != 0);
        if (!up)
            return quotient;
        return negative ? quotient - 1 : quotient + 1;
    }
    }
    return quotient;
}

std::int64_t narrow(int128 value, char const* what)
{
    if (value > INT64_MAX || value < INT64_MIN)
        throw Error(ErrorKind::invalid_amount, std::string(what) + " overflows");
    return static_cast<std::int64_t>(value);
}

// Parses [sign] digits [. digits] [e|E [sign] digits] into value * 10^digits.
// Excess fractional precision is rounded half-even when `round_excess` is set,
// otherwise rejected.
int128 parse_scaled(std::string_view text, int digits, bool round_excess, char const* what)
{
    auto fail = [&](char const* why) -> int128 {
        throw Error(ErrorKind::invalid_amount,
                    std::string(what) + " '" + std::string(text) + "': " + why);
    };
    if (text.empty())
        fail("empty");
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string mantissa;
    int fraction_digits = 0;
    bool seen_point = false;
    bool seen_digit = false;
    for (; pos < text.size(); ++pos) {
        char const c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa.push_back(c);
            seen_digit = true;
            if (seen_point)
                ++fraction_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit)
        fail("no digits");
    int exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        if (pos < text.size() && text[pos] == '+')
            ++pos;
        auto const [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
        if (ec != std::errc() || ptr != text.data() + text.size())
            fail("bad exponent");
        pos = text.size();
    }
    if (pos != text.size())
        fail("unexpected character");

    // value = mantissa * 10^(exponent - fraction_digits); want value * 10^digits.
    int const shift = exponent - fraction_digits + digits;
    std::size_t first = mantissa.find_first_not_of('0');
    if (first == std::string::npos)
        return 0;
    mantissa.erase(0, first);
    if (mantissa.size() > 36)
        fail("too many digits");
    int128 raw = 0;
    for (char c : mantissa)
        raw = raw * 10 + (c - '0');
    int128 result = 0;
    if (shift >= 0) {
        if (shift > 30 || static_cast<int>(mantissa.size()) + shift > 37)
            fail("out of range");
        result = raw * pow10(shift);
    } else {
        if (-shift > 37) {
            result = 0;
            if (!round_excess)
                fail("too many fractional digits");
        } else {
            int128 const divisor = pow10(-shift);
            if (raw % divisor != 0 && !round_excess)
                fail("too many fractional digits");
            result = divide(raw, divisor, Rounding::half_even);
        }
    }
    return negative ? -result : result;
}

std::string format_scaled(int128 value, int digits)
{
    bool const negative = value < 0;
    int128 magnitude = negative ? -value : value;
    int128 const unit = pow10(digits);
    int128 whole = magnitude / unit;
    int128 fraction = magnitude % unit;

    std::string whole_text;
    do {
        whole_text.insert(whole_text.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
        whole /= 10;
    } while (whole > 0);

    std::string out = negative ? "-" : "";
    out += whole_text;
    if (fraction != 0) {
        std::string frac(static_cast<std::size_t>(digits), '0');
        for (int i = digits - 1; i >= 0; --i) {
            frac[static_cast<std::size_t>(i)] = static_cast<char>('0' + static_cast<int>(fraction % 10));
            fraction /= 10;
        }
        while (!frac.empty() && frac.back() == '0')
            frac.pop_back();
        out += '.';
        out += frac;
    }
    return out;
}

std::string shortest(double value)
{
    std::array<char, 64> buffer{};
    auto const [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc())
        throw Error(ErrorKind::invalid_amount, "cannot format number");
    return std::string(buffer.data(), ptr);
}

}  // namespace

Amount Amount::parse(std::string_view text)
{
    int128 const micros = parse_scaled(text, 6, false, "amount");
    if (micros >= parse_limit || micros <= -parse_limit)
        throw Error(ErrorKind::invalid_amount,
                    "amount '" + std::string(text) + "' exceeds 15 significant digits");
    return Amount(static_cast<std::int64_t>(micros));
}

Amount Amount::from_double(double value)
{
    if (!std::isfinite(value))
        throw Error(ErrorKind::invalid_amount, "non-finite amount");
    return parse(shortest(value));
}

std::string Amount::to_string() const
{
    return format_scaled(micros_, 6);
}

Amount Amount::operator-() const
{
    if (micros_ == INT64_MIN)
        throw Error(ErrorKind::invalid_amount, "amount negation overflows");
    return Amount(-micros_);
}

Amount& Amount::operator+=(Amount rhs)
{
    if (__builtin_add_overflow(micros_, rhs.micros_, &micros_))
        throw Error(ErrorKind::invalid_amount, "amount addition overflows");
    return *this;
}

Amount& Amount::operator-=(Amount rhs)
{
    if (__builtin_sub_overflow(micros_, rhs.micros_, &micros_))
        throw Error(ErrorKind::invalid_amount, "amount subtraction overflows");
    return *this;
}

Amount Amount::scaled(std::int64_t numerator, std::int64_t denominator, Rounding mode) const
{
    if (denominator <= 0)
        throw Error(ErrorKind::invalid_amount, "non-positive denominator");
    int128 const product = static_cast<int128>(micros_) * numerator;
    return Amount(narrow(divide(product, denominator, mode), "scaled amount"));
}

Amount min(Amount a, Amount b) noexcept { return b < a ? b : a; }
Amount max(Amount a, Amount b) noexcept { return a < b ? b : a; }

Rate Rate::parse(std::string_view text)
{
    int128 const units = parse_scaled(text, 12, true, "rate");
    if (units <= 0)
        throw Error(ErrorKind::invalid_amount, "rate '" + std::string(text) + "' must be positive");
    return Rate(narrow(units, "rate"));
}

Rate Rate::from_double(double value)
{
    if (!std::isfinite(value))
        throw Error(ErrorKind::invalid_amount, "non-finite rate");
    return parse(shortest(value));
}

Rate Rate::ratio(Amount quote, Amount base)
{
    if (!base.is_positive() || !quote.is_positive())
        throw Error(ErrorKind::invalid_amount, "rate needs positive amounts");
    int128 const units = divide(static_cast<int128>(quote.micros()) * scale, base.micros(),
                                Rounding::half_even);
    if (units <= 0)
        throw Error(ErrorKind::invalid_amount, "rate underflows");
    return Rate(narrow(units, "rate"));
}

std::string Rate::to_string() const
{
    return format_scaled(units_, 12);
}

Rate Rate::inverse() const
{
    int128 const units = divide(static_cast<int128>(scale) * scale, units_, Rounding::half_even);
    if (units <= 0)
        throw Error(ErrorKind::invalid_amount, "inverse rate underflows");
    return Rate(narrow(units, "inverse rate"));
}

Rate Rate::operator*(Rate rhs) const
{
    int128 const units =
        divide(static_cast<int128>(units_) * rhs.units_, scale, Rounding::half_even);
    if (units <= 0)
        throw Error(ErrorKind::invalid_amount, "rate product underflows");
    return Rate(narrow(units, "rate product"));
}

Amount Rate::apply(Amount amount, Rounding mode) const
{
    int128 const micros = divide(static_cast<int128>(amount.micros()) * units_, scale, mode);
    return Amount::from_micros(narrow(micros, "converted amount"));
}

Limit Limit::parse(std::string_view text)
{
    if (text.size() == 3 && (text[0] == 'i' || text[0] == 'I') && (text[1] == 'n' || text[1] == 'N') &&
        (text[2] == 'f' || text[2] == 'F'))
        return unbounded();
    return Limit(Amount::parse(text));
}

std::optional<Amount> Limit::headroom(Amount balance) const
{
    if (!bound_)
        return std::nullopt;
    return *bound_ - balance;
}

std::string Limit::to_string() const
{
    return bound_ ? bound_->to_string() : "inf";
}

}  // namespace creditnet
