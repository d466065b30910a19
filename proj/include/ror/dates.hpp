#pragma once

#include <compare>
#include <string>

namespace ror {

/// Calendar date. Comparisons are lexicographic (year, month, day).
struct Date {
    int year = 0;
    int month = 0; // 1..12
    int day = 0;   // 1..31

    auto operator<=>(const Date&) const = default;

    bool is_leap_day() const { return month == 2 && day == 29; }

    /// Day-of-year on the fixed 365-day calendar (Feb 29 has no index).
    /// Mar 1 is day 60 in every year. Throws DataError for Feb 29.
    int day_of_year_365() const;

    /// Next calendar date, skipping Feb 29 (the 365-day working calendar).
    Date next_no_leap() const;

    std::string to_string() const; // ISO-8601, YYYY-MM-DD
};

bool is_valid_date(const Date& d); // true also for Feb 29 in leap years
bool is_leap_year(int year);

/// Parses strict ISO-8601 `YYYY-MM-DD`. Throws DataError on malformed input.
Date parse_iso_date(const std::string& text);

} // namespace ror
