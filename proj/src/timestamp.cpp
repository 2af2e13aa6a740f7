#include "etaxi/timestamp.hpp"

#include <chrono>
#include <cstdio>

namespace etaxi {

namespace {

bool all_digits(std::string_view s)
{
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

int digits(std::string_view s, std::size_t pos, std::size_t n)
{
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

} // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text)
{
    if (text.size() != 14 || !all_digits(text)) return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{year{digits(text, 0, 4)},
                             month{static_cast<unsigned>(digits(text, 4, 2))},
                             day{static_cast<unsigned>(digits(text, 6, 2))}};
    const int hh = digits(text, 8, 2);
    const int mm = digits(text, 10, 2);
    const int ss = digits(text, 12, 2);
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) return std::nullopt;

    const auto day_start = sys_days{ymd}.time_since_epoch();
    return duration_cast<seconds>(day_start).count() + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    const auto days_since = floor<days>(seconds{t});
    const year_month_day ymd{sys_days{days_since}};
    const auto rem = t - duration_cast<seconds>(days_since).count();

    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u%02d%02d%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

} // namespace etaxi
