#include <catch_amalgamated.hpp>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "spreadcast/data/synthetic.hpp"
#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/evalx/rolling.hpp"
#include "spreadcast/evalx/scoring.hpp"

using namespace spreadcast;
using namespace spreadcast::evalx;
using dists::Family;
using dists::ParamVector;
using Catch::Approx;

TEST_CASE("pinball values") {
    CHECK(pinball_value(10, 50, 14) == 2.0);
    CHECK(pinball_value(10, 90, 5) == Approx(0.5));
    CHECK(pinball_value(3, 17, 3) == 0.0);
    QuantileGrid g;
    g.levels = {25, 75};
    g.values = {0, 10};
    g.tier = Tier::Full;
    CHECK(pinball_score(g, 10) == Approx(1.25));
    g.values = {4, 4};
    CHECK(pinball_score(g, 4) == 0.0);
    g.tier = Tier::Failed;
    CHECK_THROWS_AS(pinball_score(g, 1), DomainError);
}

TEST_CASE("quantile grid and brute force score") {
    const ParamVector p(2.0, 3.0);
    const QuantileGrid g = extract_quantiles(Family::Normal, p);
    REQUIRE(g.tier == Tier::Full);
    REQUIRE(g.levels.size() == 99);
    CHECK(g.at(50) == Approx(2.0).margin(1e-12));
    CHECK(g.at(10) - 2.0 == Approx(2.0 - g.at(90)).margin(1e-12));
    CHECK(std::isnan(g.at(0)));
    for (std::size_t i = 1; i < g.values.size(); ++i) CHECK(g.values[i] > g.values[i - 1]);

    const boost::math::normal_distribution<double> nd(2.0, 3.0);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> y(2.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double obs = y(rng);
        double loop = 0.0;
        for (int a = 1; a <= 99; ++a) {
            const double q = boost::math::quantile(nd, a / 100.0);
            loop += obs < q ? (1 - a / 100.0) * (q - obs) : (a / 100.0) * (obs - q);
        }
        CHECK(std::abs(pinball_score(g, obs) - loop / 99) < 1e-10);
    }

    for (Family f : {Family::JSU, Family::SEP2, Family::ST2, Family::ST5}) {
        const QuantileGrid h = extract_quantiles(f, ParamVector(0.0, 1.0, 0.4, 3.0));
        CHECK(h.tier == Tier::Full);
        for (std::size_t i = 1; i < h.values.size(); ++i) CHECK(h.values[i] > h.values[i - 1]);
    }
}

TEST_CASE("fallback tiers on near-degenerate shapes") {
    const QuantileGrid t97 = extract_quantiles(Family::ST2, ParamVector(0.0, 1.0, 0.0, 0.115));
    CHECK(t97.tier == Tier::Trim97);
    CHECK(t97.levels.front() == 2);
    CHECK(t97.levels.back() == 98);
    const QuantileGrid t95 = extract_quantiles(Family::ST2, ParamVector(0.0, 1.0, 0.0, 0.10));
    CHECK(t95.tier == Tier::Trim95);
    CHECK(t95.levels.size() == 95);
    const QuantileGrid dead = extract_quantiles(Family::ST2, ParamVector(0.0, 1.0, 0.0, 0.05));
    CHECK(dead.tier == Tier::Failed);
    CHECK(dead.values.empty());

    int calls = 0;
    const QuantileGrid flat = extract_quantiles([&calls](double) {
        ++calls;
        return 1.0;
    });
    CHECK(flat.tier == Tier::Failed);
    const QuantileGrid picky = extract_quantiles([](double l) {
        if (l < 0.025) throw QuantileFailure("tail");
        return l;
    });
    CHECK(picky.tier == Tier::Trim95);
}

TEST_CASE("pinball measure bookkeeping") {
    const std::vector<double> s{1, 2, 3};
    const PinballReport r = pinball_measure(s);
    CHECK(r.measure == 2.0);
    CHECK(r.omitted == 0);
    const double nan = std::nan("");
    const std::vector<double> gaps{1, nan, 3, nan, 5};
    const PinballReport g = pinball_measure(gaps);
    CHECK(g.measure == 3.0);
    CHECK(g.omitted == 2);
    CHECK(g.evaluated == static_cast<int>(gaps.size()) - g.omitted);
    std::vector<double> rev(gaps.rbegin(), gaps.rend());
    CHECK(pinball_measure(rev).measure == g.measure);
    CHECK_THROWS_AS(pinball_measure(std::vector<double>{nan, nan}), EmptyHorizon);
}

TEST_CASE("rmse") {
    CHECK(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == Approx(std::sqrt(12.5)));
    CHECK(rmse(std::vector<double>{0, 0, std::nan("")}, std::vector<double>{4, 3, 1}) == Approx(std::sqrt(12.5)));
}

TEST_CASE("best family selection") {
    CHECK(select_best({{Family::JSU, 2.0}}) == Family::JSU);
    CHECK(select_best({{Family::JSU, 2.0}, {Family::ST5, 1.5}}) == Family::ST5);
    CHECK(select_best({{Family::ST2, 1.0}, {Family::SEP1, 1.0}, {Family::JSUo, 1.0}}) == Family::JSUo);
    CHECK(select_best({{Family::Normal, 1.0}, {Family::ST5, 1.0}}) == Family::ST5);
    CHECK(select_best({{Family::JSU, std::nan("")}, {Family::ST1, 3.0}}) == Family::ST1);
    CHECK_THROWS_AS(select_best({}), NoCandidate);
    CHECK(relative_gap(1.05, 1.0) == Approx(0.05));
}

TEST_CASE("diebold mariano") {
    std::vector<double> s1(50), s2(50);
    for (int t = 0; t < 50; ++t) {
        s1[t] = 1 + 0.5 * std::sin(t);
        s2[t] = 1.1 + 0.4 * std::cos(1.3 * t);
    }
    const DmResult r = dm_test(s1, s2);
    CHECK(r.statistic == Approx(-1.5949015464836556).epsilon(1e-12));
    CHECK(r.p_value == Approx(0.05858239175874886).epsilon(1e-10));
    CHECK(dm_test(s2, s1).p_value == Approx(1.0 - r.p_value).epsilon(1e-12));

    const DmResult same = dm_test(s1, s1);
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 0.5);
    std::vector<double> shifted = s1;
    for (auto& v : shifted) v += 1.0;
    CHECK_THROWS_AS(dm_test(s1, shifted), DegenerateVariance);
    CHECK_THROWS_AS(dm_test(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)), DomainError);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd(-1.0, 0.1);
    std::vector<double> a(383), b(383, 5.0);
    for (auto& v : a) v = 5.0 + nd(rng);
    CHECK(dm_test(a, b).p_value < 1e-10);
    a[3] = std::nan("");
    CHECK(dm_test(a, b).horizon == 382);
}

namespace {

data::SpreadPanel flat_panel(int days, std::uint64_t seed, Family f = Family::Normal) {
    data::SyntheticConfig cfg;
    cfg.days = days;
    cfg.family = f;
    cfg.seed = seed;
    cfg.a_load = 0.0;
    cfg.a_wind = 0.0;
    return data::make_spread_panel(data::synthetic_panel(cfg));
}

}  // namespace

TEST_CASE("rolling window agrees with a single fit") {
    const data::SpreadPanel sp = flat_panel(120, 2);
    const int s = data::SpreadId::from_hours(2, 9).index;
    RollingConfig cfg;
    cfg.window = 100;
    cfg.horizon = 3;
    cfg.first_row = 100;
    const RollingResult r = rolling_window_run(sp, s, Family::Normal, cfg);
    REQUIRE(r.steps.size() == 3);
    CHECK(r.missing == 0);
    for (int i = 0; i < 3; ++i) {
        const int first = i;
        const auto m = gamlss::specify(Family::Normal, sp.series(s, first, 100), sp.design(s, first, 100));
        const StepForecast f = forecast_row(m, sp, s, 100 + i);
        CHECK(r.steps[i].row == 100 + i);
        CHECK(r.steps[i].expected == f.expected);
        CHECK(r.steps[i].score == f.score);
        CHECK(r.steps[i].realized == sp.y(100 + i, s - 1));
    }
    cfg.first_row = 10;
    CHECK_THROWS_AS(rolling_window_run(sp, s, Family::Normal, cfg), DomainError);
}

TEST_CASE("rolling forecasts are unbiased on a stationary market") {
    const data::SpreadPanel sp = flat_panel(260, 6);
    const data::SpreadId id = data::SpreadId::from_hours(6, 18);
    RollingConfig cfg;
    cfg.window = 200;
    cfg.horizon = 30;
    cfg.first_row = 220;
    const RollingResult r = rolling_window_run(sp, id.index, Family::Normal, cfg);
    double mean = 0.0;
    for (const auto& s : r.steps) mean += s.expected;
    mean /= r.steps.size();
    const double truth = 8.0 * (std::sin(M_PI * id.h1 / 12.0) - std::sin(M_PI * id.h2 / 12.0));
    const double sd = 0.2 * (id.h2 - id.h1) * 2.0;
    CHECK(std::abs(mean - truth) < 3.0 * sd / std::sqrt(200.0));
}

TEST_CASE("failing spread is marked unavailable") {
    data::SyntheticConfig cfg;
    cfg.days = 80;
    data::HourlyPanel p = data::synthetic_panel(cfg);
    for (auto& day : p.price) day[1] = day[0];
    const data::SpreadPanel sp = data::make_spread_panel(p);
    RollingConfig rc;
    rc.window = 60;
    rc.horizon = 5;
    rc.first_row = 60;
    rc.max_missing = 2;
    const RollingResult r = rolling_window_run(sp, 1, Family::Normal, rc);
    CHECK(r.missing == 5);
    CHECK(r.unavailable);
    CHECK(r.steps[0].error == "NonConvergence");
    CHECK(std::isnan(r.steps[0].score));
}

TEST_CASE("archive round trip") {
    const data::SpreadPanel sp = flat_panel(90, 3);
    RollingConfig cfg;
    cfg.window = 60;
    cfg.horizon = 4;
    cfg.first_row = 70;
    std::vector<RollingResult> all{rolling_window_run(sp, 5, Family::Normal, cfg),
                                   rolling_window_run(sp, 40, Family::ST2, cfg)};
    const auto file = std::filesystem::temp_directory_path() / "spreadcast_archive_test.csv";
    write_archive(all, sp, file);
    const auto rows = read_archive(file);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].spread == 5);
    CHECK(rows[5].family == Family::ST2);
    CHECK(rows[1].expected == all[0].steps[1].expected);
    CHECK(rows[1].q05 == all[0].steps[1].grid.at(5));
    CHECK(rows[2].date == data::format_date(sp.dates[72]));
    CHECK_THROWS_AS(read_archive("/nonexistent/archive.csv"), MissingArchive);
}
