#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nftledger {

// Seconds since the Unix epoch, always UTC.
using UnixSeconds = std::int64_t;

// Days since the Unix epoch (UTC calendar day index).
using DayNumber = std::int32_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

/// Parses an ISO-8601 timestamp ("2022-01-17T12:34:56", optional fractional
/// seconds, optional "Z" or "+HH:MM"/"-HH:MM" offset; a missing offset means
/// UTC). Returns the normalized UTC instant, or nullopt if unparseable.
std::optional<UnixSeconds> parse_iso8601(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(UnixSeconds ts);

/// Parses "YYYY-MM-DD" or "YYYY-MM" (first of month) into a day number.
std::optional<DayNumber> parse_date(std::string_view text);

/// Formats a day number as "YYYY-MM-DD".
std::string format_date(DayNumber day);

/// UTC calendar day containing the instant.
DayNumber day_of(UnixSeconds ts);

}  // namespace nftledger
