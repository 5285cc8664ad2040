#pragma once

#include <chrono>
#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace creditnet {

/// Opaque wallet identifier: non-empty, printable, no whitespace.
class WalletId {
public:
    WalletId() = default;
    explicit WalletId(std::string value);

    std::string const& str() const noexcept { return value_; }

    friend auto operator<=>(WalletId const&, WalletId const&) = default;
    friend bool operator==(WalletId const&, WalletId const&) = default;

private:
    std::string value_;
};

/// Currency code of 3 to 40 printable characters. XRP is the native token and
/// is never carried on a credit link.
class Currency {
public:
    Currency() = default;
    explicit Currency(std::string code);

    static Currency xrp() { return Currency("XRP"); }

    std::string const& str() const noexcept { return code_; }
    bool is_xrp() const noexcept { return code_ == "XRP"; }

    friend auto operator<=>(Currency const&, Currency const&) = default;
    friend bool operator==(Currency const&, Currency const&) = default;

private:
    std::string code_;
};

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DD" or integer epoch seconds.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Half-open interval [start, end).
struct TimeInterval {
    Timestamp start;
    Timestamp end;

    bool empty() const noexcept { return end <= start; }
    bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
};

}  // namespace creditnet

template <>
struct std::hash<creditnet::WalletId> {
    std::size_t operator()(creditnet::WalletId const& id) const noexcept
    {
        return std::hash<std::string>{}(id.str());
    }
};

template <>
struct std::hash<creditnet::Currency> {
    std::size_t operator()(creditnet::Currency const& c) const noexcept
    {
        return std::hash<std::string>{}(c.str());
    }
};
