#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace rfme {

/// UTC instant at second precision.
using Instant = std::chrono::sys_seconds;
/// UTC calendar day.
using Date = std::chrono::sys_days;

/// Parses an RFC 3339 timestamp ("2023-01-05T10:00:00Z", "...+05:30",
/// optional fractional seconds which are truncated). Returns nullopt on any
/// syntax or range error. The offset is applied so the result is UTC.
std::optional<Instant> parse_rfc3339(std::string_view text);

/// "YYYY-MM-DD" only.
std::optional<Date> parse_date(std::string_view text);

/// Always emits the canonical "YYYY-MM-DDTHH:MM:SSZ" form.
std::string format_rfc3339(Instant t);
std::string format_date(Date d);

inline Date utc_date(Instant t) { return std::chrono::floor<std::chrono::days>(t); }

/// Whole days from `from` to `to` (to - from).
inline long long days_between(Date from, Date to) { return (to - from).count(); }

}  // namespace rfme
