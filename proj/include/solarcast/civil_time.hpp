#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "solarcast/errors.hpp"

namespace solarcast {

/// A civil wall-clock instant with no zone attached. Series timestamps are
/// local civil time; the station's fixed UTC offset gives them meaning.
struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;

    auto operator<=>(const CivilDateTime&) const = default;
};

inline bool is_leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

inline bool is_valid_date(int y, int m, int d) {
    return m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

inline void validate_datetime(const CivilDateTime& t) {
    if (!is_valid_date(t.year, t.month, t.day))
        throw InputError("invalid calendar date");
    if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 ||
        t.second < 0 || t.second > 59)
        throw InputError("invalid time of day");
}

/// Days since 1970-01-01 (Howard Hinnant's civil_from_days inverse).
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDateTime civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    CivilDateTime out;
    out.year = static_cast<int>(y + (m <= 2));
    out.month = static_cast<int>(m);
    out.day = static_cast<int>(d);
    return out;
}

inline std::int64_t days_since_epoch(const CivilDateTime& t) {
    return days_from_civil(t.year, t.month, t.day);
}

inline std::int64_t hours_since_epoch(const CivilDateTime& t) {
    return days_since_epoch(t) * 24 + t.hour;
}

/// 1..365/366 within the calendar year.
inline int day_of_year(const CivilDateTime& t) {
    return static_cast<int>(days_since_epoch(t) -
                            days_from_civil(t.year, 1, 1)) +
           1;
}

inline CivilDateTime add_days(const CivilDateTime& t, std::int64_t n) {
    CivilDateTime out = civil_from_days(days_since_epoch(t) + n);
    out.hour = t.hour;
    out.minute = t.minute;
    out.second = t.second;
    return out;
}

inline CivilDateTime add_hours(const CivilDateTime& t, std::int64_t n) {
    const std::int64_t h = hours_since_epoch(t) + n;
    std::int64_t d = h / 24;
    std::int64_t rem = h % 24;
    if (rem < 0) {
        rem += 24;
        --d;
    }
    CivilDateTime out = civil_from_days(d);
    out.hour = static_cast<int>(rem);
    out.minute = t.minute;
    out.second = t.second;
    return out;
}

inline double decimal_hours(const CivilDateTime& t) {
    return t.hour + t.minute / 60.0 + t.second / 3600.0;
}

namespace detail {

inline int parse_int_field(std::string_view s, std::size_t pos, std::size_t len,
                           const char* what) {
    if (pos + len > s.size()) throw InputError(std::string("truncated ") + what);
    int value = 0;
    const char* first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw InputError(std::string("malformed ") + what);
    return value;
}

}  // namespace detail

/// Accepts `YYYY-MM-DD` (midnight implied) or `YYYY-MM-DDTHH:MM[:SS]`.
inline CivilDateTime parse_datetime(std::string_view s) {
    if (s.size() != 10 && s.size() != 16 && s.size() != 19)
        throw InputError("timestamp must be YYYY-MM-DD or YYYY-MM-DDTHH:MM[:SS]");
    if (s[4] != '-' || s[7] != '-') throw InputError("malformed date separators");
    CivilDateTime t;
    t.year = detail::parse_int_field(s, 0, 4, "year");
    t.month = detail::parse_int_field(s, 5, 2, "month");
    t.day = detail::parse_int_field(s, 8, 2, "day");
    if (s.size() > 10) {
        if (s[10] != 'T') throw InputError("expected 'T' date/time separator");
        if (s[13] != ':') throw InputError("malformed time separators");
        t.hour = detail::parse_int_field(s, 11, 2, "hour");
        t.minute = detail::parse_int_field(s, 14, 2, "minute");
        if (s.size() == 19) {
            if (s[16] != ':') throw InputError("malformed time separators");
            t.second = detail::parse_int_field(s, 17, 2, "second");
        }
    }
    validate_datetime(t);
    return t;
}

inline std::string format_date(const CivilDateTime& t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", t.year, t.month, t.day);
    return buf;
}

inline std::string format_datetime(const CivilDateTime& t) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", t.year,
                  t.month, t.day, t.hour, t.minute, t.second);
    return buf;
}

}  // namespace solarcast
