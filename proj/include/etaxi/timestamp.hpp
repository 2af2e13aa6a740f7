#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace etaxi {

/// Seconds since 1970-01-01T00:00:00, no time zone (records are local time).
using Timestamp = std::int64_t;

/// Decodes a 14-digit `YYYYMMDDHHMMSS` field. Returns nullopt when the text is
/// not exactly 14 digits or does not name a valid calendar instant.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Inverse of parse_timestamp.
std::string format_timestamp(Timestamp t);

} // namespace etaxi
