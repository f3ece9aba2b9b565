#include "spreadcast/pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "spreadcast/data/diagnostics.hpp"
#include "spreadcast/data/panel.hpp"
#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/evalx/rolling.hpp"
#include "spreadcast/evalx/scoring.hpp"
#include "spreadcast/gamlss/gamlss.hpp"
#include "spreadcast/trade/trade.hpp"
#include "spreadcast/util/csv.hpp"
#include "spreadcast/util/hash.hpp"
#include "spreadcast/util/pool.hpp"

namespace spreadcast::pipeline {

namespace fs = std::filesystem;
using dists::Family;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kSelectionHeader = {"spread", "h1", "h2", "family", "status"};

std::string name(Family f) { return std::string(dists::to_string(f)); }

void ensure_parent(const fs::path& file) { fs::create_directories(file.parent_path()); }

}  // namespace

std::string to_string(Stage s) {
    switch (s) {
        case Stage::Ingest: return "ingest";
        case Stage::Select: return "select";
        case Stage::Forecast: return "forecast";
        case Stage::Report: return "report";
        case Stage::Backtest: return "backtest";
    }
    return "?";
}

Stage parse_stage(const std::string& text) {
    for (Stage s : kAllStages) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown stage '" + text + "'");
}

RunManifest RunManifest::read(const fs::path& file) {
    RunManifest m;
    if (!fs::exists(file)) return m;
    std::ifstream in(file);
    json j;
    try {
        in >> j;
        m.version = j.at("version").get<std::string>();
        m.config = j.at("config");
        for (const auto& [stage, rec] : j.at("stages").items()) {
            StageRecord r;
            r.input_hash = rec.at("input_hash").get<std::string>();
            r.seconds = rec.at("seconds").get<double>();
            r.skipped = rec.at("skipped").get<bool>();
            for (const auto& s : rec.at("spreads")) {
                r.spreads.push_back({s.at("spread").get<int>(), s.at("status").get<std::string>(),
                                     s.at("family").get<std::string>()});
            }
            m.stages[stage] = std::move(r);
        }
    } catch (const json::exception& e) {
        throw SchemaError(file.string() + ": " + e.what());
    }
    return m;
}

void RunManifest::write(const fs::path& file) const {
    json j;
    j["version"] = version;
    j["config"] = config;
    j["stages"] = json::object();
    for (const auto& [stage, r] : stages) {
        json spreads = json::array();
        for (const auto& s : r.spreads) {
            spreads.push_back({{"spread", s.spread}, {"status", s.status}, {"family", s.family}});
        }
        j["stages"][stage] = {{"input_hash", r.input_hash},
                              {"seconds", r.seconds},
                              {"skipped", r.skipped},
                              {"spreads", spreads}};
    }
    ensure_parent(file);
    std::ofstream out(file);
    out << j.dump(2) << '\n';
}

std::vector<SelectionRow> read_selection(const fs::path& file) {
    if (!fs::exists(file)) throw MissingArchive(file.string() + " does not exist");
    csv::Reader r(file);
    r.expect_header(kSelectionHeader);
    std::vector<SelectionRow> out;
    std::vector<std::string_view> c;
    while (r.next(c)) {
        if (c.size() != kSelectionHeader.size()) throw SchemaError(r.where() + ": expected 5 cells");
        SelectionRow row;
        row.spread = static_cast<int>(csv::parse(c[0], r.where()));
        if (c[3] != "NA") {
            try {
                row.family = dists::parse_family(c[3]);
            } catch (const DomainError& e) {
                throw SchemaError(r.where() + ": " + e.what());
            }
        }
        row.status = std::string(c[4]);
        out.push_back(row);
    }
    if (out.size() != static_cast<std::size_t>(data::kSpreads)) {
        throw SchemaError(file.string() + ": expected 276 spreads, found " + std::to_string(out.size()));
    }
    return out;
}

RowSplit row_split(int days, const PipelineConfig& cfg) {
    data::Split s = data::split(days);
    if (cfg.train_last) s.train_last = *cfg.train_last;
    if (cfg.validation_last) s.validation_last = *cfg.validation_last;
    s.validation_first = s.train_last + 1;
    s.test_first = s.validation_last + 1;
    if (s.train_last < 40 || s.validation_last <= s.train_last || s.test_first > days) {
        throw ConfigError("split boundaries " + std::to_string(s.train_last) + "/" +
                          std::to_string(s.validation_last) + " do not fit " + std::to_string(days) + " days");
    }
    RowSplit r;
    r.train_first = s.train_first - 2;
    r.train_count = s.train_length();
    r.validation_first = s.validation_first - 2;
    r.validation_count = s.validation_length();
    r.test_first = s.test_first - 2;
    r.test_count = s.test_length();
    return r;
}

Pipeline::Pipeline(PipelineConfig config, bool force)
    : config_(std::move(config)), force_(force), layout_{config_.out} {
    config_.validate();
    manifest_ = RunManifest::read(layout_.manifest());
    manifest_.version = kVersion;
    manifest_.config = config_.to_json();
}

void Pipeline::run(const std::vector<Stage>& stages) {
    for (Stage s : stages) run(s);
}

void Pipeline::run(Stage stage) {
    const std::string key = to_string(stage);
    const std::string hash = input_hash(stage);
    auto it = manifest_.stages.find(key);
    bool present = true;
    for (const auto& f : outputs(stage)) present = present && fs::exists(f);
    if (!force_ && present && it != manifest_.stages.end() && it->second.input_hash == hash) {
        it->second.skipped = true;
        manifest_.write(layout_.manifest());
        return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    StageRecord rec;
    rec.spreads = execute(stage);
    rec.input_hash = hash;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest_.stages[key] = std::move(rec);
    manifest_.write(layout_.manifest());
}

std::string Pipeline::input_hash(Stage stage) const {
    util::Hasher h;
    h.add(kVersion).add(to_string(stage));
    const json& c = manifest_.config;
    switch (stage) {
        case Stage::Ingest: {
            if (config_.manifest.empty()) throw ConfigError("ingest needs a dataset manifest");
            const auto m = data::DatasetManifest::read(config_.manifest);
            h.add_file(config_.manifest);
            for (const auto& f : {m.prices, m.wind, m.solar, m.load, m.fuels, m.calendar}) h.add_file(f);
            break;
        }
        case Stage::Select:
            h.add_file(layout_.panel());
            h.add(c["families"].dump()).add(c["train_last"].dump()).add(c["validation_last"].dump());
            break;
        case Stage::Forecast:
            h.add_file(layout_.panel()).add_file(layout_.selection());
            h.add(c["train_last"].dump()).add(c["validation_last"].dump());
            h.add(c["window"].dump()).add(c["horizon"].dump()).add(c["max_missing"].dump());
            break;
        case Stage::Report:
            h.add_file(layout_.best_archive()).add_file(layout_.normal_archive());
            if (fs::exists(layout_.panel())) h.add_file(layout_.panel());
            h.add(c["costs"].dump()).add(c["levels"].dump());
            break;
        case Stage::Backtest:
            h.add_file(layout_.best_archive());
            h.add(c["costs"].dump()).add(c["levels"].dump());
            break;
    }
    return h.hex();
}

std::vector<fs::path> Pipeline::outputs(Stage stage) const {
    const fs::path rep = layout_.report_dir();
    switch (stage) {
        case Stage::Ingest: return {layout_.panel(), layout_.repair_log()};
        case Stage::Select: return {layout_.aic(), layout_.validation(), layout_.selection()};
        case Stage::Forecast: return {layout_.best_archive(), layout_.normal_archive()};
        case Stage::Report:
            return {rep / "pl_difference.csv", rep / "dm_pvalues.csv", rep / "rmse_best.csv",
                    rep / "rmse_normal.csv", rep / "summary.csv",     rep / "moments.csv",
                    rep / "sweep.csv"};
        case Stage::Backtest: return {layout_.sweep(), layout_.best_levels(), layout_.trades()};
    }
    return {};
}

std::vector<SpreadStatus> Pipeline::execute(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return ingest();
        case Stage::Select: return select();
        case Stage::Forecast: return forecast();
        case Stage::Report: return report();
        case Stage::Backtest: return backtest();
    }
    return {};
}

std::vector<SpreadStatus> Pipeline::ingest() {
    const auto m = data::DatasetManifest::read(config_.manifest);
    data::RepairLog log;
    const data::HourlyPanel panel = data::ingest(m, &log);
    ensure_parent(layout_.panel());
    data::write_panel(panel, layout_.panel());
    csv::Writer w(layout_.repair_log());
    w.row({"date", "action", "variable", "hour", "value"});
    for (const auto& e : log) {
        w.row({e.date, e.action, e.variable, e.hour < 0 ? "NA" : std::to_string(e.hour), csv::format(e.value)});
    }
    return {};
}

namespace {

struct FamilyFit {
    Family family;
    std::string status = "fitted";  // fitted, non-convergent
    double loglik = kNaN;
    double aic = kNaN;
};

struct Validation {
    Family family;
    std::string status = "fitted";
    double pinball = kNaN;
    double rmse = kNaN;
    int evaluated = 0;
    int omitted = 0;
};

struct SpreadSelect {
    std::vector<FamilyFit> simple;
    std::optional<Family> simple_best;
    std::vector<Validation> validation;
    std::optional<Family> best;
};

}  // namespace

std::vector<SpreadStatus> Pipeline::select() {
    const data::HourlyPanel hourly = data::read_panel(layout_.panel());
    const data::SpreadPanel panel = data::make_spread_panel(hourly);
    const RowSplit rows = row_split(static_cast<int>(hourly.days()), config_);
    std::vector<SpreadSelect> sel(data::kSpreads);

    // stage (a): intercept-only fits on the training rows, ranked by AIC
    util::parallel_for(data::kSpreads, config_.threads, [&](int i) {
        const int s = i + 1;
        const auto y = panel.series(s, rows.train_first, rows.train_count);
        SpreadSelect& out = sel[i];
        std::vector<std::pair<Family, double>> ranked;
        for (Family f : config_.families) {
            FamilyFit r{f};
            try {
                const gamlss::FittedModel m = gamlss::intercept_only_fit(f, y);
                if (!m.converged) throw NonConvergence("intercept-only fit did not converge");
                r.loglik = m.loglik;
                r.aic = m.aic;
                ranked.emplace_back(f, m.aic);
            } catch (const Error&) {
                r.status = "non-convergent";
            }
            out.simple.push_back(r);
        }
        if (!ranked.empty()) out.simple_best = evalx::select_best(ranked);
    });

    // candidates for stage (b): families that win stage (a) for some spread
    std::vector<Family> candidates;
    for (Family f : config_.families) {
        for (const auto& s : sel) {
            if (s.simple_best == f) {
                candidates.push_back(f);
                break;
            }
        }
    }

    // stage (b): backward-eliminated fits on the training rows, scored by
    // pinball loss over the validation rows with the coefficients held fixed
    util::parallel_for(data::kSpreads, config_.threads, [&](int i) {
        const int s = i + 1;
        SpreadSelect& out = sel[i];
        const auto y = panel.series(s, rows.train_first, rows.train_count);
        std::vector<std::pair<Family, double>> measures;
        for (Family f : candidates) {
            Validation v{f};
            try {
                const auto x = panel.design(s, rows.train_first, rows.train_count);
                const gamlss::FittedModel m = gamlss::specify(f, y, x);
                std::vector<double> scores, expected, realized;
                for (int k = 0; k < rows.validation_count; ++k) {
                    const evalx::StepForecast fc = evalx::forecast_row(m, panel, s, rows.validation_first + k);
                    scores.push_back(fc.score);
                    expected.push_back(fc.expected);
                    realized.push_back(fc.realized);
                }
                const evalx::PinballReport pr = evalx::pinball_measure(scores);
                v.pinball = pr.measure;
                v.evaluated = pr.evaluated;
                v.omitted = pr.omitted;
                v.rmse = evalx::rmse(expected, realized);
                measures.emplace_back(f, v.pinball);
            } catch (const Error&) {
                v.status = "non-convergent";
            }
            out.validation.push_back(v);
        }
        if (!measures.empty()) out.best = evalx::select_best(measures);
    });

    ensure_parent(layout_.aic());
    {
        csv::Writer w(layout_.aic());
        w.row({"spread", "h1", "h2", "family", "status", "loglik", "aic", "best"});
        for (int i = 0; i < data::kSpreads; ++i) {
            const auto id = data::SpreadId::from_index(i + 1);
            for (const auto& r : sel[i].simple) {
                w.row({std::to_string(i + 1), std::to_string(id.h1), std::to_string(id.h2), name(r.family), r.status,
                       csv::format(r.loglik), csv::format(r.aic), sel[i].simple_best == r.family ? "1" : "0"});
            }
        }
    }
    {
        csv::Writer w(layout_.validation());
        w.row({"spread", "h1", "h2", "family", "status", "pinball", "rmse", "evaluated", "omitted", "best"});
        for (int i = 0; i < data::kSpreads; ++i) {
            const auto id = data::SpreadId::from_index(i + 1);
            for (const auto& v : sel[i].validation) {
                w.row({std::to_string(i + 1), std::to_string(id.h1), std::to_string(id.h2), name(v.family), v.status,
                       csv::format(v.pinball), csv::format(v.rmse), std::to_string(v.evaluated),
                       std::to_string(v.omitted), sel[i].best == v.family ? "1" : "0"});
            }
        }
    }
    std::vector<SpreadStatus> status;
    csv::Writer w(layout_.selection());
    w.row(kSelectionHeader);
    for (int i = 0; i < data::kSpreads; ++i) {
        const auto id = data::SpreadId::from_index(i + 1);
        const auto& b = sel[i].best;
        const std::string st = b ? "fitted" : "non-convergent";
        const std::string fam = b ? name(*b) : "NA";
        w.row({std::to_string(i + 1), std::to_string(id.h1), std::to_string(id.h2), fam, st});
        status.push_back({i + 1, st, fam});
    }
    return status;
}

std::vector<SpreadStatus> Pipeline::forecast() {
    const data::HourlyPanel hourly = data::read_panel(layout_.panel());
    const data::SpreadPanel panel = data::make_spread_panel(hourly);
    const RowSplit rows = row_split(static_cast<int>(hourly.days()), config_);
    const auto selection = read_selection(layout_.selection());

    evalx::RollingConfig rc;
    rc.first_row = rows.test_first;
    rc.window = config_.window.value_or(rows.test_first);
    rc.horizon = config_.horizon.value_or(rows.test_count);
    rc.max_missing = config_.max_missing;
    if (rc.window > rc.first_row || rc.first_row + rc.horizon > panel.rows()) {
        throw ConfigError("window " + std::to_string(rc.window) + " and horizon " + std::to_string(rc.horizon) +
                          " do not fit the test period starting at row " + std::to_string(rc.first_row));
    }

    std::vector<std::optional<evalx::RollingResult>> best(data::kSpreads);
    std::vector<evalx::RollingResult> normal(data::kSpreads);
    util::parallel_for(data::kSpreads, config_.threads, [&](int i) {
        const int s = i + 1;
        normal[i] = evalx::rolling_window_run(panel, s, Family::Normal, rc);
        const auto& fam = selection[i].family;
        if (!fam) return;
        best[i] = *fam == Family::Normal ? normal[i] : evalx::rolling_window_run(panel, s, *fam, rc);
    });

    std::vector<evalx::RollingResult> kept;
    std::vector<SpreadStatus> status;
    for (int i = 0; i < data::kSpreads; ++i) {
        if (!best[i]) {
            status.push_back({i + 1, "non-convergent", "NA"});
            continue;
        }
        status.push_back({i + 1, best[i]->unavailable ? "unavailable" : "fitted", name(best[i]->family)});
        kept.push_back(std::move(*best[i]));
    }
    ensure_parent(layout_.best_archive());
    evalx::write_archive(kept, panel, layout_.best_archive());
    evalx::write_archive(normal, panel, layout_.normal_archive());
    return status;
}

namespace {

// Spreads whose moments are tracked over the test period.
constexpr std::pair<int, int> kMomentSpreads[] = {{0, 8}, {8, 12}, {12, 16}, {16, 20}};

struct SpreadSeries {
    std::optional<Family> family;
    bool unavailable = false;
    std::vector<double> scores, expected, realized;
};

std::vector<SpreadSeries> by_spread(const std::vector<evalx::ArchiveRow>& rows) {
    std::vector<SpreadSeries> out(data::kSpreads);
    for (const auto& r : rows) {
        SpreadSeries& s = out.at(r.spread - 1);
        s.family = r.family;
        s.unavailable = r.unavailable;
        s.scores.push_back(r.score);
        s.expected.push_back(r.expected);
        s.realized.push_back(r.realized);
    }
    return out;
}

double measure_of(const SpreadSeries& s) {
    if (!s.family || s.unavailable) return kNaN;
    try {
        return evalx::pinball_measure(s.scores).measure;
    } catch (const EmptyHorizon&) {
        return kNaN;
    }
}

double rmse_of(const SpreadSeries& s) { return s.family ? evalx::rmse(s.expected, s.realized) : kNaN; }

/// 24 x 24 hour-pair matrix, row label h1 and one column per h2.
void write_matrix(const Eigen::MatrixXd& m, const fs::path& file) {
    csv::Writer w(file);
    std::vector<std::string> header{"h1"};
    for (int h = 0; h < data::kHours; ++h) header.push_back(std::to_string(h));
    w.row(header);
    for (int i = 0; i < m.rows(); ++i) {
        std::vector<std::string> cells{std::to_string(i)};
        for (int j = 0; j < m.cols(); ++j) cells.push_back(csv::format(m(i, j)));
        w.row(cells);
    }
}

Eigen::MatrixXd pair_matrix() { return Eigen::MatrixXd::Constant(data::kHours, data::kHours, kNaN); }

std::string direction_name(trade::Direction d) {
    switch (d) {
        case trade::Direction::DischargeFirst: return "discharge_first";
        case trade::Direction::ChargeFirst: return "charge_first";
        case trade::Direction::NoTrade: return "none";
    }
    return "none";
}

}  // namespace

std::vector<SpreadStatus> Pipeline::report() {
    const auto best_rows = evalx::read_archive(layout_.best_archive());
    const auto normal_rows = evalx::read_archive(layout_.normal_archive());
    const auto best = by_spread(best_rows);
    const auto normal = by_spread(normal_rows);
    const fs::path dir = layout_.report_dir();
    fs::create_directories(dir);

    Eigen::MatrixXd pl = pair_matrix(), dm = pair_matrix(), rmse_b = pair_matrix(), rmse_n = pair_matrix();
    std::vector<SpreadStatus> status;
    {
        csv::Writer w(dir / "summary.csv");
        w.row({"spread", "h1", "h2", "family", "status", "pl_best", "pl_normal", "pl_difference", "relative_gap",
               "rmse_best", "rmse_normal", "dm_statistic", "dm_p_value", "dm_horizon"});
        for (int i = 0; i < data::kSpreads; ++i) {
            const auto id = data::SpreadId::from_index(i + 1);
            const SpreadSeries& b = best[i];
            const SpreadSeries& n = normal[i];
            const std::string st = !b.family ? "non-convergent" : b.unavailable ? "unavailable" : "fitted";
            const double lb = measure_of(b), ln = measure_of(n);
            const double diff = lb - ln;
            const double gap = std::isfinite(diff) && ln != 0.0 ? evalx::relative_gap(lb, ln) : kNaN;
            double stat = kNaN, pv = kNaN;
            int horizon = 0;
            if (std::isfinite(diff)) {
                try {
                    const evalx::DmResult r = evalx::dm_test(b.scores, n.scores);
                    stat = r.statistic;
                    pv = r.p_value;
                    horizon = r.horizon;
                } catch (const Error&) {
                }
            }
            pl(id.h1, id.h2) = diff;
            dm(id.h1, id.h2) = pv;
            rmse_b(id.h1, id.h2) = rmse_of(b);
            rmse_n(id.h1, id.h2) = rmse_of(n);
            w.row({std::to_string(i + 1), std::to_string(id.h1), std::to_string(id.h2),
                   b.family ? name(*b.family) : "NA", st, csv::format(lb), csv::format(ln), csv::format(diff),
                   csv::format(gap), csv::format(rmse_b(id.h1, id.h2)), csv::format(rmse_n(id.h1, id.h2)),
                   csv::format(stat), csv::format(pv), std::to_string(horizon)});
            status.push_back({i + 1, st, b.family ? name(*b.family) : "NA"});
        }
    }
    write_matrix(pl, dir / "pl_difference.csv");
    write_matrix(dm, dir / "dm_pvalues.csv");
    write_matrix(rmse_b, dir / "rmse_best.csv");
    write_matrix(rmse_n, dir / "rmse_normal.csv");

    {
        csv::Writer w(dir / "moments.csv");
        w.row({"date", "spread", "h1", "h2", "family", "mu", "sigma", "nu", "tau", "expected", "q05", "q95",
               "realized"});
        for (const auto& [h1, h2] : kMomentSpreads) {
            const int s = data::SpreadId::from_hours(h1, h2).index;
            for (const auto& r : best_rows) {
                if (r.spread != s) continue;
                w.row({r.date, std::to_string(s), std::to_string(h1), std::to_string(h2), name(r.family),
                       csv::format(r.mu), csv::format(r.sigma), csv::format(r.nu), csv::format(r.tau),
                       csv::format(r.expected), csv::format(r.q05), csv::format(r.q95), csv::format(r.realized)});
            }
        }
    }

    if (fs::exists(layout_.panel())) {
        const data::HourlyPanel hourly = data::read_panel(layout_.panel());
        const data::DescriptiveStats d = data::descriptive_stats(data::make_spread_panel(hourly), hourly);
        write_matrix(d.skewness, dir / "skewness.csv");
        write_matrix(d.kurtosis, dir / "kurtosis.csv");
        write_matrix(d.covariance, dir / "price_covariance.csv");
        write_matrix(d.correlation, dir / "price_correlation.csv");
    }

    const trade::Market market = trade::Market::from_archive(best_rows);
    trade::write_sweep(trade::sweep(market, config_.costs, config_.levels), dir / "sweep.csv");
    return status;
}

std::vector<SpreadStatus> Pipeline::backtest() {
    const auto rows = evalx::read_archive(layout_.best_archive());
    const trade::Market market = trade::Market::from_archive(rows);
    const auto table = trade::sweep(market, config_.costs, config_.levels);
    ensure_parent(layout_.sweep());
    trade::write_sweep(table, layout_.sweep());

    csv::Writer levels(layout_.best_levels());
    levels.row({"c", "b", "PNL", "mean", "stderr"});
    csv::Writer trades(layout_.trades());
    trades.row({"date", "c", "b", "spread", "h1", "h2", "direction", "forecast_profit", "gate_level", "gate_value",
                "realized", "pnl"});
    for (const auto& row : table) {
        if (!row.best) continue;
        levels.row({csv::format(row.cost), csv::format(row.level), csv::format(row.report.total),
                    csv::format(row.report.mean), csv::format(row.report.stderr_mean)});
        const trade::TradeConfig tc{row.cost, row.level};
        for (int d = 0; d < market.days(); ++d) {
            const trade::TradeDecision dec = trade::select_trade(market.candidates[d], tc);
            if (dec.direction == trade::Direction::NoTrade) {
                trades.row({market.dates[d], csv::format(row.cost), csv::format(row.level), "NA", "NA", "NA", "none",
                            "0", "NA", "NA", "NA", "0"});
                continue;
            }
            const auto id = data::SpreadId::from_index(dec.spread);
            const double y = market.realized(d, dec.spread - 1);
            trades.row({market.dates[d], csv::format(row.cost), csv::format(row.level), std::to_string(dec.spread),
                        std::to_string(id.h1), std::to_string(id.h2), direction_name(dec.direction),
                        csv::format(dec.forecast_profit), std::to_string(dec.gate_level),
                        csv::format(dec.gate_value), csv::format(y),
                        csv::format(trade::realized_pnl(y, dec.direction, row.cost, row.level))});
        }
    }
    return {};
}

}  // namespace spreadcast::pipeline
