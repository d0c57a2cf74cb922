// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/time_utils.hpp"

#include <cstdio>
#include <stdexcept>

namespace tvrec {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

// Days from 1970-01-01 to y-m-d (civil calendar).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = floor_div(y, 400);
    const int yoe = static_cast<int>(y - era * 400);
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = floor_div(z, 146097);
    const int doe = static_cast<int>(z - era * 146097);
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe + era * 400);
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    // Expected exactly: YYYY-MM-DDThh:mm:ssZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        throw std::invalid_argument("not an RFC 3339 UTC timestamp: " + std::string(text));
    }
    auto digits = [&](int pos, int len) {
        int v = 0;
        for (int i = pos; i < pos + len; ++i) {
            char c = text[static_cast<size_t>(i)];
            if (c < '0' || c > '9')
                throw std::invalid_argument("not an RFC 3339 UTC timestamp: " + std::string(text));
            v = v * 10 + (c - '0');
        }
        return v;
    };
    int year = digits(0, 4), month = digits(5, 2), day = digits(8, 2);
    int hour = digits(11, 2), minute = digits(14, 2), second = digits(17, 2);
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
        minute > 59 || second > 59) {
        throw std::invalid_argument("timestamp out of range: " + std::string(text));
    }
    return days_from_civil(year, month, day) * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

std::string format_rfc3339(Timestamp ts) {
    std::int64_t days = floor_div(ts, kSecondsPerDay);
    int rem = static_cast<int>(ts - days * kSecondsPerDay);
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d, rem / 3600,
                  (rem / 60) % 60, rem % 60);
    return buf;
}

std::int64_t day_of(Timestamp ts) { return floor_div(ts, kSecondsPerDay); }

int utc_weekday(Timestamp ts) {
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((day_of(ts) % 7) + 7 + 3) % 7);
}

bool is_weekend(Timestamp ts) { return utc_weekday(ts) >= 5; }

DayPart daypart_of(Timestamp ts) {
    std::int64_t sec = ts - day_of(ts) * kSecondsPerDay;
    int hour = static_cast<int>(sec / 3600);
    if (hour < 6) return DayPart::Night;
    if (hour < 12) return DayPart::Morning;
    if (hour < 18) return DayPart::Afternoon;
    return DayPart::Evening;
}

WeekClock WeekClock::starting_monday_before(Timestamp t) {
    std::int64_t days = day_of(t);
    int dow = static_cast<int>(((days % 7) + 7 + 3) % 7);
    return WeekClock{(days - dow) * kSecondsPerDay};
}

int WeekClock::week_of(Timestamp t) const {
    return static_cast<int>(floor_div(t - origin, kSecondsPerWeek));
}

}  // namespace tvrec
