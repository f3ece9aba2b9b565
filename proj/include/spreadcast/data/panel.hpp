#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace spreadcast::data {

inline constexpr int kHours = 24;

using Date = std::chrono::sys_days;
using DayValues = std::array<double, kHours>;

Date parse_date(const std::string& text);  // YYYY-MM-DD, throws SchemaError
std::string format_date(Date d);

enum class DayKind { Normal, SpringForward, FallBack };

/// EU rule: clocks change on the last Sunday of March and of October.
DayKind calendar_kind(Date d);

/// One wall-clock reading; NaN value marks a missing entry.
struct RawRecord {
    int hour = 0;
    double value = 0.0;
};

struct NormalizedDay {
    DayValues values{};
    DayKind kind = DayKind::Normal;
};

/// 23 records (hour 02 absent): hour 02 = mean(hour 01, hour 03).
/// 25 records (hour 02 twice): the first hour-02 reading is kept.
/// 24 records: one per hour, reordered by hour.
/// Anything else throws CalendarError.
NormalizedDay dst_normalize(const std::vector<RawRecord>& records);

/// Mean of `series[day - 7 .. day - 1][h]` with h = hour, or hour - 1 when
/// `shift_hour` is set (clock-change weeks). Throws InsufficientHistory for
/// day < 7 or when a source value is itself missing.
double fill_missing(const std::vector<DayValues>& series, std::size_t day, int hour,
                    bool shift_hour = false);

/// True when a spring-forward day falls in days (day - 7, day] of `dates`.
bool in_spring_change_week(const std::vector<Date>& dates, std::size_t day);

/// Hours with no sunshine after repair.
inline constexpr std::array<int, 6> kDarkHours = {22, 23, 0, 1, 2, 3};

struct HourlyPanel {
    std::vector<Date> dates;
    std::vector<DayValues> price;  // EUR/MWh
    std::vector<DayValues> wind;   // MW
    std::vector<DayValues> solar;  // MW
    std::vector<DayValues> load;   // MW
    std::vector<double> gas;
    std::vector<double> coal;
    std::vector<double> dummy;     // holiday or weekend, 0/1

    std::size_t days() const noexcept { return dates.size(); }
    /// Throws SchemaError when the column lengths disagree or values are non-finite.
    void validate() const;
};

struct RepairEntry {
    std::string date;
    std::string action;    // dst_interpolate, dst_drop, fill_7day, solar_zero, forward_fill
    std::string variable;  // affected variables joined by '|'
    int hour = -1;         // -1 for whole-day entries
    double value = 0.0;
};

using RepairLog = std::vector<RepairEntry>;

struct DatasetManifest {
    std::filesystem::path prices, wind, solar, load, fuels, calendar;

    /// JSON object with those six keys; relative paths resolve against the
    /// manifest's directory. Throws SchemaError.
    static DatasetManifest read(const std::filesystem::path& file);
    void write(const std::filesystem::path& file) const;
};

/// Reads the CSV set, normalizes clock changes, fills gaps and zeroes night
/// solar. Hourly files: `timestamp,value` with local wall-clock timestamps
/// `YYYY-MM-DDTHH:MM`; fuels: `date,gas,coal`; calendar: `date,dummy`.
/// Empty cells or NA mark missing values. Throws SchemaError with file and
/// line on malformed input.
HourlyPanel ingest(const DatasetManifest& manifest, RepairLog* log = nullptr);

/// Applies the night-solar rule in place; returns the number of values zeroed.
int zero_night_solar(HourlyPanel& panel, RepairLog* log = nullptr);

/// Repaired panel as a single CSV (one row per day, 24-column blocks) and back.
void write_panel(const HourlyPanel& panel, const std::filesystem::path& file);
HourlyPanel read_panel(const std::filesystem::path& file);

}  // namespace spreadcast::data
