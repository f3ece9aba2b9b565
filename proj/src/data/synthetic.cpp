#include "spreadcast/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <utility>

#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/util/csv.hpp"

namespace spreadcast::data {

namespace fs = std::filesystem;

HourlyPanel synthetic_panel(const SyntheticConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    const dists::Distribution shock(cfg.family, dists::ParamVector(0.0, 1.0, cfg.nu, cfg.tau));

    HourlyPanel p;
    const Date start = parse_date(cfg.start);
    double gas = 20.0, coal = 8.0, wind_level = 8000.0;
    for (int d = 0; d < cfg.days; ++d) {
        const Date date = start + std::chrono::days{d};
        p.dates.push_back(date);
        gas = std::max(5.0, gas + 0.3 * nd(rng));
        coal = std::max(2.0, coal + 0.1 * nd(rng));
        wind_level = std::clamp(wind_level + 1500.0 * nd(rng), 500.0, 30000.0);
        const std::chrono::weekday wd{date};
        p.gas.push_back(gas);
        p.coal.push_back(coal);
        p.dummy.push_back(wd == std::chrono::Saturday || wd == std::chrono::Sunday ? 1.0 : 0.0);

        const double e = shock.quantile(dists::open_uniform(rng));
        DayValues price{}, wind{}, solar{}, load{};
        for (int h = 0; h < kHours; ++h) {
            wind[h] = std::max(0.0, wind_level * (1.0 + 0.1 * nd(rng)));
            const double sun = std::sin(M_PI * (h - 5) / 15.0);
            solar[h] = (h >= 6 && h <= 20 && sun > 0) ? 12000.0 * sun * (0.6 + 0.4 * std::abs(nd(rng))) : 0.0;
            load[h] = 50000.0 + 12000.0 * std::sin(M_PI * (h - 4) / 20.0) + 1500.0 * nd(rng);
            const double base = 30.0 + 8.0 * std::sin(M_PI * h / 12.0);
            const double w = 1.0 + 0.2 * h;
            price[h] = base + 0.5 * gas + cfg.a_load * load[h] + cfg.a_wind * wind[h] + w * cfg.scale * e;
        }
        p.price.push_back(price);
        p.wind.push_back(wind);
        p.solar.push_back(solar);
        p.load.push_back(load);
    }
    return p;
}

fs::path write_raw_dataset(const HourlyPanel& p, const fs::path& dir, int missing_cells, std::uint64_t seed) {
    fs::create_directories(dir);
    std::mt19937_64 rng(seed);
    std::set<std::pair<std::size_t, int>> blanks;
    if (p.days() > 8) {
        std::uniform_int_distribution<std::size_t> day(8, p.days() - 1);
        std::uniform_int_distribution<int> hour(4, 21);
        while (static_cast<int>(blanks.size()) < missing_cells) blanks.insert({day(rng), hour(rng)});
    }
    auto stamp = [](Date d, int h) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "T%02d:00", h);
        return format_date(d) + buf;
    };
    const char* names[] = {"prices.csv", "wind.csv", "solar.csv", "load.csv"};
    const std::vector<DayValues>* series[] = {&p.price, &p.wind, &p.solar, &p.load};
    for (int v = 0; v < 4; ++v) {
        csv::Writer w(dir / names[v]);
        w.row({"timestamp", "value"});
        for (std::size_t d = 0; d < p.days(); ++d) {
            const DayKind kind = calendar_kind(p.dates[d]);
            for (int h = 0; h < kHours; ++h) {
                if (kind == DayKind::SpringForward && h == 2) continue;
                const bool blank = v == 0 ? blanks.count({d, h}) > 0 : false;
                const double val = (*series[v])[d][h];
                w.row({stamp(p.dates[d], h), blank ? std::string("NA") : csv::format(val)});
                if (kind == DayKind::FallBack && h == 2) w.row({stamp(p.dates[d], h), csv::format(val + 1.0)});
            }
        }
    }
    {
        csv::Writer w(dir / "fuels.csv");
        w.row({"date", "gas", "coal"});
        for (std::size_t d = 0; d < p.days(); ++d) {
            w.row({format_date(p.dates[d]), csv::format(p.gas[d]), csv::format(p.coal[d])});
        }
    }
    {
        csv::Writer w(dir / "calendar.csv");
        w.row({"date", "dummy"});
        for (std::size_t d = 0; d < p.days(); ++d) w.row({format_date(p.dates[d]), csv::format(p.dummy[d])});
    }
    DatasetManifest m{dir / "prices.csv", dir / "wind.csv", dir / "solar.csv",
                      dir / "load.csv",   dir / "fuels.csv", dir / "calendar.csv"};
    const fs::path manifest = dir / "manifest.json";
    m.write(manifest);
    return manifest;
}

}  // namespace spreadcast::data
