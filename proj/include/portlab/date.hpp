#pragma once

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace portlab {

inline bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

inline int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

/// Calendar day, ISO-8601 text form YYYY-MM-DD.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    /// Strict parse of "YYYY-MM-DD"; rejects impossible calendar days.
    static std::optional<Date> parse(std::string_view text) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
        auto digits = [](std::string_view s, int& out) {
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            return ec == std::errc{} && ptr == s.data() + s.size();
        };
        Date d;
        if (!digits(text.substr(0, 4), d.year) || !digits(text.substr(5, 2), d.month) ||
            !digits(text.substr(8, 2), d.day))
            return std::nullopt;
        if (d.month < 1 || d.month > 12) return std::nullopt;
        if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
        return d;
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
        return buf;
    }

    /// Days since 1970-01-01 (negative before); civil-calendar algorithm.
    std::int64_t to_days() const {
        std::int64_t y = year - (month <= 2 ? 1 : 0);
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy =
            static_cast<unsigned>((153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1);
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
    }

    static Date from_days(std::int64_t days) {
        days += 719468;
        const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(days - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Date{static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m),
                    static_cast<int>(d)};
    }

    /// 0 = Monday ... 6 = Sunday.
    int weekday() const {
        std::int64_t z = to_days();
        return static_cast<int>(z >= -3 ? (z + 3) % 7 : (z + 4) % 7 + 6);
    }
};

}  // namespace portlab
