#include "spreadcast/data/panel.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "spreadcast/errors.hpp"

namespace spreadcast::data {

using namespace std::chrono;

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&text](std::size_t pos, std::size_t len, auto& out) {
        if (text.size() < pos + len) return false;
        const auto r = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return r.ec == std::errc() && r.ptr == text.data() + pos + len;
    };
    const bool shape = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shape || !num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) {
        throw SchemaError("'" + text + "' is not a YYYY-MM-DD date");
    }
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw SchemaError("'" + text + "' is not a valid calendar date");
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DayKind calendar_kind(Date d) {
    const year_month_day ymd{d};
    const weekday wd{d};
    if (wd != Sunday) return DayKind::Normal;
    const year_month_day week_later{d + days{7}};
    if (week_later.month() == ymd.month()) return DayKind::Normal;  // not the last Sunday
    if (ymd.month() == March) return DayKind::SpringForward;
    if (ymd.month() == October) return DayKind::FallBack;
    return DayKind::Normal;
}

NormalizedDay dst_normalize(const std::vector<RawRecord>& records) {
    NormalizedDay out;
    std::array<int, kHours> seen{};
    for (const auto& r : records) {
        if (r.hour < 0 || r.hour >= kHours) {
            throw CalendarError("hour " + std::to_string(r.hour) + " outside 0..23");
        }
    }
    switch (records.size()) {
        case 23: out.kind = DayKind::SpringForward; break;
        case 24: out.kind = DayKind::Normal; break;
        case 25: out.kind = DayKind::FallBack; break;
        default:
            throw CalendarError("day has " + std::to_string(records.size()) +
                                " hours, expected 23, 24 or 25");
    }
    for (const auto& r : records) {
        if (seen[r.hour]++ == 0) out.values[r.hour] = r.value;
    }
    for (int h = 0; h < kHours; ++h) {
        const int want = (out.kind == DayKind::SpringForward && h == 2) ? 0
                         : (out.kind == DayKind::FallBack && h == 2)     ? 2
                                                                         : 1;
        if (seen[h] != want) {
            throw CalendarError("hour " + std::to_string(h) + " appears " + std::to_string(seen[h]) +
                                " times on a day with " + std::to_string(records.size()) + " hours");
        }
    }
    if (out.kind == DayKind::SpringForward) out.values[2] = 0.5 * (out.values[1] + out.values[3]);
    return out;
}

double fill_missing(const std::vector<DayValues>& series, std::size_t day, int hour, bool shift_hour) {
    if (hour < 0 || hour >= kHours) throw DomainError("hour outside 0..23");
    if (day < 7 || day > series.size()) {
        throw InsufficientHistory("filling day " + std::to_string(day) + " needs 7 prior days");
    }
    const int src = shift_hour ? std::max(hour - 1, 0) : hour;
    double sum = 0.0;
    for (std::size_t d = day - 7; d < day; ++d) {
        const double v = series[d][src];
        if (std::isnan(v)) {
            throw InsufficientHistory("source value for day " + std::to_string(day) + " hour " +
                                      std::to_string(hour) + " is itself missing");
        }
        sum += v;
    }
    return sum / 7.0;
}

bool in_spring_change_week(const std::vector<Date>& dates, std::size_t day) {
    const std::size_t first = day >= 6 ? day - 6 : 0;
    for (std::size_t d = first; d <= day && d < dates.size(); ++d) {
        if (calendar_kind(dates[d]) == DayKind::SpringForward) return true;
    }
    return false;
}

void HourlyPanel::validate() const {
    const std::size_t n = dates.size();
    if (price.size() != n || wind.size() != n || solar.size() != n || load.size() != n ||
        gas.size() != n || coal.size() != n || dummy.size() != n) {
        throw SchemaError("panel columns differ in length");
    }
    for (std::size_t d = 0; d < n; ++d) {
        for (const auto* v : {&price[d], &wind[d], &solar[d], &load[d]}) {
            for (double x : *v) {
                if (!std::isfinite(x)) throw SchemaError("non-finite hourly value on " + format_date(dates[d]));
            }
        }
        if (!std::isfinite(gas[d]) || !std::isfinite(coal[d]) || !(dummy[d] == 0.0 || dummy[d] == 1.0)) {
            throw SchemaError("bad daily value on " + format_date(dates[d]));
        }
        if (d > 0 && dates[d] != dates[d - 1] + std::chrono::days{1}) {
            throw SchemaError("dates are not consecutive at " + format_date(dates[d]));
        }
    }
}

int zero_night_solar(HourlyPanel& panel, RepairLog* log) {
    int zeroed = 0;
    for (std::size_t d = 0; d < panel.days(); ++d) {
        for (int h : kDarkHours) {
            double& v = panel.solar[d][h];
            if (v != 0.0 && !std::isnan(v)) {
                if (log) log->push_back({format_date(panel.dates[d]), "solar_zero", "solar", h, v});
                ++zeroed;
            }
            v = 0.0;
        }
    }
    return zeroed;
}

}  // namespace spreadcast::data
