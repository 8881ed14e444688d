#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace rwd {

// Calendar date with ISO-8601 text form and a serial day count,
// enough for act/360 year fractions and strict date ordering.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    // Days since 1970-01-01 (proleptic Gregorian).
    std::int64_t serial() const;

    std::string to_string() const;

    static Date parse(const std::string& iso);
    static Date from_serial(std::int64_t serial);

    Date add_days(int n) const { return from_serial(serial() + n); }
};

inline int days_between(const Date& from, const Date& to) {
    return static_cast<int>(to.serial() - from.serial());
}

// act/360 year fraction between two dates.
inline double year_fraction_act360(const Date& from, const Date& to) {
    return days_between(from, to) / 360.0;
}

}  // namespace rwd
