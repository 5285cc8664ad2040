#include "creditnet/types.hpp"

#include "creditnet/error.hpp"

#include <charconv>
#include <cstdio>

namespace creditnet {

namespace {

bool printable_token(std::string_view s)
{
    for (unsigned char c : s) {
        if (c <= 0x20 || c == 0x7f)
            return false;
    }
    return true;
}

int read_int(std::string_view text, std::size_t pos, std::size_t len)
{
    int value = 0;
    auto const [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc() || ptr != text.data() + pos + len)
        throw Error(ErrorKind::parse, "bad timestamp '" + std::string(text) + "'");
    return value;
}

}  // namespace

WalletId::WalletId(std::string value) : value_(std::move(value))
{
    if (value_.empty() || !printable_token(value_))
        throw Error(ErrorKind::invariant_violation, "invalid wallet id '" + value_ + "'");
}

Currency::Currency(std::string code) : code_(std::move(code))
{
    if (code_.size() < 3 || code_.size() > 40 || !printable_token(code_))
        throw Error(ErrorKind::invariant_violation, "invalid currency code '" + code_ + "'");
}

Timestamp parse_timestamp(std::string_view text)
{
    using namespace std::chrono;
    auto bad = [&] { return Error(ErrorKind::parse, "bad timestamp '" + std::string(text) + "'"); };
    if (text.empty())
        throw bad();

    bool all_digits = true;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!(text[i] >= '0' && text[i] <= '9') && !(i == 0 && text[i] == '-'))
            all_digits = false;
    }
    if (all_digits) {
        long long seconds = 0;
        auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw bad();
        return Timestamp(std::chrono::seconds(seconds));
    }

    if (text.size() < 10 || text[4] != '-' || text[7] != '-')
        throw bad();
    year_month_day const date{year(read_int(text, 0, 4)), month(static_cast<unsigned>(read_int(text, 5, 2))),
                              day(static_cast<unsigned>(read_int(text, 8, 2)))};
    if (!date.ok())
        throw bad();
    Timestamp result = time_point_cast<seconds>(sys_days(date));
    if (text.size() == 10)
        return result;

    if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
        throw bad();
    int const h = read_int(text, 11, 2);
    int const m = read_int(text, 14, 2);
    int const s = read_int(text, 17, 2);
    if (h > 23 || m > 59 || s > 60)
        throw bad();
    std::string_view const rest = text.substr(19);
    if (!(rest.empty() || rest == "Z" || rest == "+00:00"))
        throw bad();
    return result + hours(h) + minutes(m) + seconds(s);
}

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    auto const day_point = floor<days>(t);
    year_month_day const date{day_point};
    hh_mm_ss const clock{t - day_point};
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  static_cast<int>(clock.hours().count()), static_cast<int>(clock.minutes().count()),
                  static_cast<int>(clock.seconds().count()));
    return buffer;
}

}  // namespace creditnet
