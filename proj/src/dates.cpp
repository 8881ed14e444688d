#include "rwd/dates.hpp"

#include <cstdio>

#include "rwd/common.hpp"

namespace rwd {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

}  // namespace

std::int64_t Date::serial() const { return days_from_civil(year, month, day); }

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(const std::string& iso) {
    Date d;
    if (std::sscanf(iso.c_str(), "%d-%d-%d", &d.year, &d.month, &d.day) != 3 ||
        d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
        throw ParseError("invalid ISO-8601 date: '" + iso + "'");
    }
    // reject day-of-month overflow (e.g. February 30)
    const Date check = from_serial(d.serial());
    if (check.year != d.year || check.month != d.month || check.day != d.day) {
        throw ParseError("invalid calendar date: '" + iso + "'");
    }
    return d;
}

Date Date::from_serial(std::int64_t serial) {
    Date d;
    civil_from_days(serial, d.year, d.month, d.day);
    return d;
}

}  // namespace rwd
