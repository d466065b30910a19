#include "ror/dates.hpp"

#include "ror/errors.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace ror {

namespace {

constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};

// Cumulative days before each month on the 365-day calendar.
constexpr std::array<int, 12> month_offsets() {
    std::array<int, 12> off{};
    int acc = 0;
    for (int m = 0; m < 12; ++m) {
        off[m] = acc;
        acc += kMonthDays[m];
    }
    return off;
}

constexpr std::array<int, 12> kMonthOffsets = month_offsets();

} // namespace

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

bool is_valid_date(const Date& d) {
    if (d.month < 1 || d.month > 12 || d.day < 1) return false;
    int days = kMonthDays[d.month - 1];
    if (d.month == 2 && is_leap_year(d.year)) days = 29;
    return d.day <= days;
}

int Date::day_of_year_365() const {
    if (is_leap_day())
        throw DataError("no 365-day index for leap day " + to_string());
    return kMonthOffsets[month - 1] + day;
}

Date Date::next_no_leap() const {
    Date n = *this;
    ++n.day;
    if (n.month == 2 && n.day == 29) n.day = 30; // leap day is not on the working calendar
    if (n.day > kMonthDays[n.month - 1]) {
        n.day = 1;
        ++n.month;
        if (n.month > 12) {
            n.month = 1;
            ++n.year;
        }
    }
    return n;
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date parse_iso_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw DataError("malformed date '" + text + "', expected YYYY-MM-DD");
    Date d;
    auto parse_field = [&](int begin, int len, int& out) {
        const char* first = text.data() + begin;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        if (ec != std::errc{} || ptr != first + len)
            throw DataError("malformed date '" + text + "', expected YYYY-MM-DD");
    };
    parse_field(0, 4, d.year);
    parse_field(5, 2, d.month);
    parse_field(8, 2, d.day);
    if (!is_valid_date(d))
        throw DataError("invalid calendar date '" + text + "'");
    return d;
}

} // namespace ror
