#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace etaxi::csv {

/// Splits on commas; no quoting (none of the formats here need it).
std::vector<std::string_view> split(std::string_view line, char delim = ',');

std::string_view trim(std::string_view s);

template <typename T>
std::optional<T> parse_number(std::string_view s)
{
    s = trim(s);
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
    return value;
}

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

} // namespace etaxi::csv
