#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "spreadcast/data/panel.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/util/csv.hpp"

namespace spreadcast::data {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kKeys[] = {"prices", "wind", "solar", "load", "fuels", "calendar"};

using DayRecords = std::map<Date, std::vector<RawRecord>>;

DayRecords read_hourly(const fs::path& file) {
    csv::Reader r(file);
    r.expect_header({"timestamp", "value"});
    DayRecords out;
    std::vector<std::string_view> cells;
    Date last{};
    bool any = false;
    while (r.next(cells)) {
        const std::string_view ts = cells[0];
        if (ts.size() < 13 || (ts[10] != 'T' && ts[10] != ' ')) {
            throw SchemaError(r.where() + ": timestamp '" + std::string(ts) +
                              "' is not YYYY-MM-DDTHH:MM");
        }
        Date d;
        try {
            d = parse_date(std::string(ts.substr(0, 10)));
        } catch (const SchemaError& e) {
            throw SchemaError(r.where() + ": " + e.what());
        }
        const double hour = csv::parse(ts.substr(11, 2), r.where());
        if (std::isnan(hour) || hour != std::floor(hour)) {
            throw SchemaError(r.where() + ": bad hour in '" + std::string(ts) + "'");
        }
        if (any && d < last) throw SchemaError(r.where() + ": timestamps go backwards");
        last = d;
        any = true;
        out[d].push_back({static_cast<int>(hour), csv::parse(cells[1], r.where())});
    }
    if (!any) throw SchemaError(file.string() + ": no data rows");
    return out;
}

std::map<Date, std::vector<double>> read_daily(const fs::path& file, const std::vector<std::string>& header) {
    csv::Reader r(file);
    r.expect_header(header);
    std::map<Date, std::vector<double>> out;
    std::vector<std::string_view> cells;
    while (r.next(cells)) {
        Date d;
        try {
            d = parse_date(std::string(cells[0]));
        } catch (const SchemaError& e) {
            throw SchemaError(r.where() + ": " + e.what());
        }
        std::vector<double> v;
        for (std::size_t i = 1; i < cells.size(); ++i) v.push_back(csv::parse(cells[i], r.where()));
        if (!out.emplace(d, std::move(v)).second) throw SchemaError(r.where() + ": duplicate date");
    }
    if (out.empty()) throw SchemaError(file.string() + ": no data rows");
    return out;
}

std::string hh(int h) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%02d", h);
    return buf;
}

}  // namespace

DatasetManifest DatasetManifest::read(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError(file.string() + ": cannot open manifest");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(file.string() + ": " + e.what());
    }
    DatasetManifest m;
    fs::path* slots[] = {&m.prices, &m.wind, &m.solar, &m.load, &m.fuels, &m.calendar};
    const fs::path base = file.parent_path();
    for (int i = 0; i < 6; ++i) {
        if (!j.is_object() || !j.contains(kKeys[i]) || !j[kKeys[i]].is_string()) {
            throw SchemaError(file.string() + ": missing string entry '" + kKeys[i] + "'");
        }
        fs::path p = j[kKeys[i]].get<std::string>();
        *slots[i] = p.is_absolute() ? p : base / p;
    }
    return m;
}

void DatasetManifest::write(const fs::path& file) const {
    const fs::path* slots[] = {&prices, &wind, &solar, &load, &fuels, &calendar};
    nlohmann::ordered_json j;
    const fs::path base = file.parent_path();
    for (int i = 0; i < 6; ++i) j[kKeys[i]] = fs::relative(*slots[i], base.empty() ? "." : base).generic_string();
    std::ofstream out(file);
    if (!out) throw SchemaError(file.string() + ": cannot write manifest");
    out << j.dump(2) << '\n';
}

HourlyPanel ingest(const DatasetManifest& manifest, RepairLog* log) {
    const char* names[] = {"price", "wind", "solar", "load"};
    const fs::path* files[] = {&manifest.prices, &manifest.wind, &manifest.solar, &manifest.load};
    std::array<DayRecords, 4> raw;
    for (int v = 0; v < 4; ++v) raw[v] = read_hourly(*files[v]);

    HourlyPanel p;
    const Date first = raw[0].begin()->first;
    const Date last = raw[0].rbegin()->first;
    for (Date d = first; d <= last; d += std::chrono::days{1}) p.dates.push_back(d);
    const std::size_t n = p.dates.size();
    std::array<std::vector<DayValues>*, 4> series = {&p.price, &p.wind, &p.solar, &p.load};
    DayValues missing;
    missing.fill(kNaN);
    for (auto* s : series) s->assign(n, missing);

    for (std::size_t d = 0; d < n; ++d) {
        std::string spring, fall;
        for (int v = 0; v < 4; ++v) {
            const auto it = raw[v].find(p.dates[d]);
            if (it == raw[v].end()) continue;
            NormalizedDay nd;
            try {
                nd = dst_normalize(it->second);
            } catch (const CalendarError& e) {
                throw CalendarError(files[v]->string() + ": " + format_date(p.dates[d]) + ": " + e.what());
            }
            (*series[v])[d] = nd.values;
            std::string& bucket = nd.kind == DayKind::SpringForward ? spring : fall;
            if (nd.kind != DayKind::Normal) bucket += (bucket.empty() ? "" : "|") + std::string(names[v]);
        }
        if (log && !spring.empty()) log->push_back({format_date(p.dates[d]), "dst_interpolate", spring, 2, 0.0});
        if (log && !fall.empty()) log->push_back({format_date(p.dates[d]), "dst_drop", fall, 2, 0.0});
    }

    zero_night_solar(p, log);
    for (int v = 0; v < 4; ++v) {
        auto& s = *series[v];
        for (std::size_t d = 0; d < n; ++d) {
            for (int h = 0; h < kHours; ++h) {
                if (!std::isnan(s[d][h])) continue;
                try {
                    s[d][h] = fill_missing(s, d, h, in_spring_change_week(p.dates, d));
                } catch (const InsufficientHistory& e) {
                    throw InsufficientHistory(std::string(names[v]) + " " + format_date(p.dates[d]) +
                                              " hour " + std::to_string(h) + ": " + e.what());
                }
                if (log) log->push_back({format_date(p.dates[d]), "fill_7day", names[v], h, s[d][h]});
            }
        }
    }

    const auto fuels = read_daily(manifest.fuels, {"date", "gas", "coal"});
    const auto cal = read_daily(manifest.calendar, {"date", "dummy"});
    p.gas.assign(n, kNaN);
    p.coal.assign(n, kNaN);
    p.dummy.assign(n, kNaN);
    for (std::size_t d = 0; d < n; ++d) {
        if (auto it = fuels.find(p.dates[d]); it != fuels.end()) {
            p.gas[d] = it->second[0];
            p.coal[d] = it->second[1];
        }
        if (auto it = cal.find(p.dates[d]); it != cal.end()) p.dummy[d] = it->second[0];
        if (!std::isnan(p.dummy[d]) && p.dummy[d] != 0.0 && p.dummy[d] != 1.0) {
            throw SchemaError(manifest.calendar.string() + ": dummy on " + format_date(p.dates[d]) +
                              " must be 0 or 1");
        }
        std::vector<double>* daily[] = {&p.gas, &p.coal, &p.dummy};
        const char* dnames[] = {"gas", "coal", "dummy"};
        for (int k = 0; k < 3; ++k) {
            double& x = (*daily[k])[d];
            if (!std::isnan(x)) continue;
            if (d == 0) {
                throw InsufficientHistory(std::string(dnames[k]) + " is missing on the first day " +
                                          format_date(p.dates[d]));
            }
            x = (*daily[k])[d - 1];
            if (log) log->push_back({format_date(p.dates[d]), "forward_fill", dnames[k], -1, x});
        }
    }
    p.validate();
    return p;
}

void write_panel(const HourlyPanel& p, const fs::path& file) {
    csv::Writer w(file);
    std::vector<std::string> header{"date"};
    for (const char* prefix : {"price_", "wind_", "solar_", "load_"}) {
        for (int h = 0; h < kHours; ++h) header.push_back(prefix + hh(h));
    }
    header.insert(header.end(), {"gas", "coal", "dummy"});
    w.row(header);
    for (std::size_t d = 0; d < p.days(); ++d) {
        std::vector<std::string> row{format_date(p.dates[d])};
        for (const auto* s : {&p.price, &p.wind, &p.solar, &p.load}) {
            for (double v : (*s)[d]) row.push_back(csv::format(v));
        }
        row.push_back(csv::format(p.gas[d]));
        row.push_back(csv::format(p.coal[d]));
        row.push_back(csv::format(p.dummy[d]));
        w.row(row);
    }
}

HourlyPanel read_panel(const fs::path& file) {
    csv::Reader r(file);
    if (r.header().size() != 1 + 4 * kHours + 3 || r.header()[0] != "date") {
        throw SchemaError(file.string() + ":1: not a repaired panel file");
    }
    HourlyPanel p;
    std::vector<std::string_view> cells;
    while (r.next(cells)) {
        p.dates.push_back(parse_date(std::string(cells[0])));
        std::size_t c = 1;
        for (auto* s : {&p.price, &p.wind, &p.solar, &p.load}) {
            DayValues v{};
            for (int h = 0; h < kHours; ++h) v[h] = csv::parse(cells[c++], r.where());
            s->push_back(v);
        }
        p.gas.push_back(csv::parse(cells[c++], r.where()));
        p.coal.push_back(csv::parse(cells[c++], r.where()));
        p.dummy.push_back(csv::parse(cells[c++], r.where()));
    }
    if (p.days() == 0) throw SchemaError(file.string() + ": no data rows");
    p.validate();
    return p;
}

}  // namespace spreadcast::data
