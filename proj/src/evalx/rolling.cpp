#include "spreadcast/evalx/rolling.hpp"

#include <cmath>
#include <limits>

#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/util/csv.hpp"

namespace spreadcast::evalx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kHeader = {
    "spread", "h1",  "h2",  "family", "step", "row",      "date",     "missing",  "tier",
    "mu",     "sigma", "nu", "tau",   "expected", "q05", "q95",    "realized", "score", "unavailable"};

}  // namespace

StepForecast forecast_row(const gamlss::FittedModel& model, const data::SpreadPanel& panel, int spread,
                          int row) {
    StepForecast f;
    f.row = row;
    f.realized = panel.y(row, spread - 1);
    f.expected = kNaN;
    f.score = kNaN;
    try {
        const dists::ParamVector p = gamlss::predict_params(model, panel.covariates(spread, row));
        f.params = p;
        f.expected = dists::expected_value(model.family, p);
        f.grid = extract_quantiles(model.family, p);
        if (f.grid.ok()) f.score = pinball_score(f.grid, f.realized);
    } catch (const Error& e) {
        f.missing = true;
        f.error = e.kind();
        f.params.reset();
        f.expected = kNaN;
    }
    return f;
}

RollingResult rolling_window_run(const data::SpreadPanel& panel, int spread, dists::Family family,
                                 const RollingConfig& cfg) {
    if (cfg.window < 2 || cfg.horizon < 1 || cfg.first_row < cfg.window ||
        cfg.first_row + cfg.horizon > panel.rows()) {
        throw DomainError("rolling window of " + std::to_string(cfg.window) + " rows and horizon " +
                          std::to_string(cfg.horizon) + " from row " + std::to_string(cfg.first_row) +
                          " does not fit a panel of " + std::to_string(panel.rows()) + " rows");
    }
    RollingResult out;
    out.spread = spread;
    out.family = family;
    gamlss::SpecifyTrace trace;
    for (int i = 0; i < cfg.horizon; ++i) {
        const int row = cfg.first_row + i;
        const int first = row - cfg.window;
        StepForecast f;
        try {
            const auto y = panel.series(spread, first, cfg.window);
            const auto x = panel.design(spread, first, cfg.window);
            const gamlss::FittedModel m = gamlss::specify(family, y, x, cfg.fit, cfg.warm_start ? &trace : nullptr);
            f = forecast_row(m, panel, spread, row);
        } catch (const Error& e) {
            f.row = row;
            f.missing = true;
            f.error = e.kind();
            f.expected = kNaN;
            f.score = kNaN;
            f.realized = panel.y(row, spread - 1);
        }
        f.step = i;
        out.missing += f.missing;
        out.steps.push_back(std::move(f));
    }
    out.unavailable = out.missing > cfg.max_missing;
    return out;
}

void write_archive(const std::vector<RollingResult>& results, const data::SpreadPanel& panel,
                   const std::filesystem::path& file) {
    csv::Writer w(file);
    w.row(kHeader);
    for (const auto& r : results) {
        const data::SpreadId id = data::SpreadId::from_index(r.spread);
        for (const auto& s : r.steps) {
            const bool have = s.params.has_value();
            w.row({std::to_string(r.spread), std::to_string(id.h1), std::to_string(id.h2),
                   std::string(dists::to_string(r.family)), std::to_string(s.step), std::to_string(s.row),
                   data::format_date(panel.dates[s.row]), s.missing ? "1" : "0",
                   std::to_string(static_cast<int>(s.grid.tier)),
                   csv::format(have ? s.params->mu() : kNaN), csv::format(have ? s.params->sigma() : kNaN),
                   csv::format(have ? s.params->nu() : kNaN), csv::format(have ? s.params->tau() : kNaN),
                   csv::format(s.expected), csv::format(s.grid.at(5)), csv::format(s.grid.at(95)),
                   csv::format(s.realized), csv::format(s.score), r.unavailable ? "1" : "0"});
        }
    }
}

std::vector<ArchiveRow> read_archive(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) throw MissingArchive(file.string() + " does not exist");
    csv::Reader r(file);
    r.expect_header(kHeader);
    std::vector<ArchiveRow> out;
    std::vector<std::string_view> c;
    auto integer = [&r](std::string_view v) {
        const double x = csv::parse(v, r.where());
        if (!std::isfinite(x) || x != std::floor(x)) throw SchemaError(r.where() + ": expected an integer");
        return static_cast<int>(x);
    };
    while (r.next(c)) {
        ArchiveRow a;
        a.spread = integer(c[0]);
        try {
            a.family = dists::parse_family(std::string(c[3]));
        } catch (const DomainError& e) {
            throw SchemaError(r.where() + ": " + e.what());
        }
        a.step = integer(c[4]);
        a.row = integer(c[5]);
        a.date = std::string(c[6]);
        a.missing = integer(c[7]) != 0;
        const int tier = integer(c[8]);
        if (tier != 0 && tier != 95 && tier != 97 && tier != 99) throw SchemaError(r.where() + ": bad tier");
        a.tier = static_cast<Tier>(tier);
        a.mu = csv::parse(c[9], r.where());
        a.sigma = csv::parse(c[10], r.where());
        a.nu = csv::parse(c[11], r.where());
        a.tau = csv::parse(c[12], r.where());
        a.expected = csv::parse(c[13], r.where());
        a.q05 = csv::parse(c[14], r.where());
        a.q95 = csv::parse(c[15], r.where());
        a.realized = csv::parse(c[16], r.where());
        a.score = csv::parse(c[17], r.where());
        a.unavailable = integer(c[18]) != 0;
        out.push_back(a);
    }
    return out;
}

}  // namespace spreadcast::evalx
