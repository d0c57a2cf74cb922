// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tvrec {

using Timestamp = std::int64_t;  // Unix epoch seconds, UTC

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

/// Parses a UTC RFC 3339 timestamp of the form YYYY-MM-DDThh:mm:ssZ.
/// Throws std::invalid_argument on anything else (offsets, fractions).
Timestamp parse_rfc3339(std::string_view text);

std::string format_rfc3339(Timestamp ts);

/// Day index since epoch (floor, so pre-1970 is handled too).
std::int64_t day_of(Timestamp ts);

/// 0 = Monday ... 6 = Sunday.
int utc_weekday(Timestamp ts);

bool is_weekend(Timestamp ts);

// Day-part boundaries: morning 06-12, afternoon 12-18, evening 18-24,
// night 00-06.
enum class DayPart { Morning = 0, Afternoon = 1, Evening = 2, Night = 3 };
inline constexpr int kNumDayParts = 4;

DayPart daypart_of(Timestamp ts);

/// Week indexing anchored to a Monday 00:00 UTC origin.
struct WeekClock {
    Timestamp origin = 0;

    /// Origin = the Monday 00:00 UTC at or before `t`.
    static WeekClock starting_monday_before(Timestamp t);

    int week_of(Timestamp t) const;
    Timestamp week_start(int week) const { return origin + static_cast<Timestamp>(week) * kSecondsPerWeek; }
};

}  // namespace tvrec
