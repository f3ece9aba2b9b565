#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "spreadcast/errors.hpp"
#include "spreadcast/trade/trade.hpp"

using namespace spreadcast;
using namespace spreadcast::trade;
using Catch::Approx;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Exhaustive reference: list every gated candidate with its profit, then
// take the first after sorting by (-profit, spread).
TradeDecision enumerate(const std::vector<Candidate>& cands, double c, double b) {
    struct Row {
        double profit;
        int spread;
        double e;
    };
    std::vector<Row> rows;
    for (const auto& k : cands) {
        if (std::isnan(k.expected) || k.expected == 0.0) continue;
        const double q = k.expected > 0 ? k.q05 : k.q95;
        const double qq = std::isnan(q) ? 0.0 : q;
        if (!(k.expected > 0 ? qq > c : qq < -c)) continue;
        const double p = k.expected > 0 ? (k.expected - c) * b : (-k.expected - c) * (1 - b);
        rows.push_back({p, k.spread, k.expected});
    }
    TradeDecision d;
    if (rows.empty()) return d;
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
        return x.profit != y.profit ? x.profit > y.profit : x.spread < y.spread;
    });
    d.spread = rows[0].spread;
    d.forecast_profit = rows[0].profit;
    d.direction = rows[0].e > 0 ? Direction::DischargeFirst : Direction::ChargeFirst;
    return d;
}

// Three hours, three spreads, normal densities with known mean and sd.
Market toy_market(int days, unsigned seed, bool night_cheap) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(-40, 40);
    constexpr double z95 = 1.6448536269514722;
    Market m;
    m.realized = Eigen::MatrixXd::Constant(days, 276, kNaN);
    m.candidates.resize(days);
    for (int t = 0; t < days; ++t) {
        m.dates.push_back("d" + std::to_string(t));
        double mu[3];
        for (double& v : mu) v = night_cheap ? 0.0 : u(rng);
        if (night_cheap) {
            mu[0] = -30 - 10 * std::fabs(z(rng));
            mu[1] = -40 - 10 * std::fabs(z(rng));
            mu[2] = -5 - 5 * std::fabs(z(rng));
        }
        const double sd[3] = {4, 6, 3};
        for (int s = 1; s <= 3; ++s) {
            m.candidates[t].push_back({s, mu[s - 1], mu[s - 1] - z95 * sd[s - 1], mu[s - 1] + z95 * sd[s - 1]});
            m.realized(t, s - 1) = mu[s - 1] + sd[s - 1] * z(rng);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("candidate profit") {
    CHECK(candidate_profit(20, 5, 0.5) == Approx(7.5));
    CHECK(candidate_profit(-30, 10, 0.2) == Approx(16));
    CHECK(candidate_profit(20, 5, 0) == 0.0);
    CHECK(candidate_profit(0, 5, 0.3) == 0.0);
}

TEST_CASE("risk gate") {
    CHECK_FALSE(risk_gate(8, 3, 20, 5));
    CHECK(risk_gate(15, 12, 20, 10));
    CHECK(risk_gate(-15, -30, -12, 10));
    CHECK_FALSE(risk_gate(-15, -30, -8, 10));
    CHECK_FALSE(risk_gate(20, kNaN, 30, 5));
    // a quantile beyond c on the wrong side of zero gives no protection
    CHECK_FALSE(risk_gate(20, -30, 60, 10));
    CHECK_FALSE(risk_gate(-20, -60, 30, 10));
    evalx::QuantileGrid failed;
    failed.tier = evalx::Tier::Failed;
    CHECK_FALSE(risk_gate(failed, 50, 5));
    CHECK_FALSE(risk_gate(failed, -50, 5));
    evalx::QuantileGrid g;
    g.tier = evalx::Tier::Trim95;
    for (int a = 3; a <= 97; ++a) {
        g.levels.push_back(a);
        g.values.push_back(a);
    }
    CHECK(risk_gate(g, 50, 4));
    CHECK_FALSE(risk_gate(g, 50, 5));
}

TEST_CASE("trade selection") {
    const TradeConfig cfg{10, 0.5};
    std::vector<Candidate> none = {{1, 20, 5, 30}, {2, -20, -30, -5}};
    CHECK(select_trade(none, cfg).direction == Direction::NoTrade);
    std::vector<Candidate> one = {{1, 20, 5, 30}, {2, -20, -30, -12}, {3, kNaN, kNaN, kNaN}};
    const TradeDecision d = select_trade(one, cfg);
    CHECK(d.spread == 2);
    CHECK(d.direction == Direction::ChargeFirst);
    CHECK(d.forecast_profit == Approx(5));
    CHECK(d.gate_level == 95);
    std::vector<Candidate> tie = {{7, 30, 12, 40}, {4, -30, -40, -12}};
    CHECK(select_trade(tie, cfg).spread == 4);
    CHECK(select_trade(std::vector<Candidate>{}, cfg).direction == Direction::NoTrade);
}

TEST_CASE("selection matches exhaustive enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-60, 60);
    std::uniform_int_distribution<int> pick(0, 9);
    for (int rep = 0; rep < 2000; ++rep) {
        std::vector<Candidate> cands;
        for (int s = 1; s <= 3; ++s) {
            const double e = pick(rng) == 0 ? kNaN : std::round(u(rng));
            const double w = std::fabs(u(rng)) / 2;
            Candidate k{s, e, e - w, e + w};
            if (pick(rng) == 0) k.q05 = k.q95 = kNaN;
            cands.push_back(k);
        }
        for (double c : kDefaultCosts) {
            for (double b : kDefaultLevels) {
                const TradeDecision got = select_trade(cands, {c, b});
                const TradeDecision want = enumerate(cands, c, b);
                REQUIRE(got.direction == want.direction);
                if (want.direction != Direction::NoTrade) {
                    REQUIRE(got.spread == want.spread);
                    REQUIRE(got.forecast_profit == want.forecast_profit);
                }
            }
        }
    }
}

TEST_CASE("realized pnl") {
    CHECK(realized_pnl(4, Direction::DischargeFirst, 5, 0.5) == Approx(-0.5));
    CHECK(realized_pnl(5, Direction::DischargeFirst, 5, 0.5) == 0.0);
    CHECK(realized_pnl(-5, Direction::ChargeFirst, 5, 0.5) == 0.0);
    CHECK(realized_pnl(-30, Direction::ChargeFirst, 10, 0.2) == Approx(16));
    CHECK(realized_pnl(-8, Direction::DischargeFirst, 5, 0.5) == Approx(-6.5));
    CHECK(realized_pnl(12, Direction::NoTrade, 5, 0.5) == 0.0);
    CHECK(realized_pnl(20, Direction::DischargeFirst, 5, 0.5) == candidate_profit(20, 5, 0.5));
}

TEST_CASE("backtest arithmetic") {
    Eigen::MatrixXd realized = Eigen::MatrixXd::Constant(3, 276, kNaN);
    realized(0, 0) = 9;   // (9 - 5) * 0.5 = 2
    realized(1, 1) = -3;  // (3 - 5) * 0.5 = -1
    realized(2, 2) = 11;  // (11 - 5) * 0.5 = 3
    std::vector<TradeDecision> d(3);
    d[0] = {1, Direction::DischargeFirst};
    d[1] = {2, Direction::ChargeFirst};
    d[2] = {3, Direction::DischargeFirst};
    const BacktestReport r = backtest(d, realized, {5, 0.5});
    CHECK(r.total == Approx(4));
    CHECK(r.mean == Approx(4.0 / 3));
    CHECK(r.loss_days == 1);
    CHECK(r.loss_total == Approx(-1));
    CHECK(r.loss_mean == Approx(-1));
    CHECK(r.no_trade_days == 0);
    CHECK(r.stderr_mean == Approx(std::sqrt(13.0 / 3) / std::sqrt(3.0)));

    const std::vector<TradeDecision> idle(4);
    const BacktestReport z = backtest(idle, Eigen::MatrixXd::Zero(4, 276), {5, 0.5});
    CHECK(z.total == 0.0);
    CHECK(z.loss_days == 0);
    CHECK(z.loss_mean == 0.0);
    CHECK(z.no_trade_days == 4);

    CHECK_THROWS_AS(backtest(std::vector<TradeDecision>{}, realized, {5, 0.5}), EmptyHorizon);
    d[0].spread = 9;
    CHECK_THROWS_AS(backtest(d, realized, {5, 0.5}), DomainError);
}

TEST_CASE("backtest matches brute force on a 20-day market") {
    const Market m = toy_market(20, 5, false);
    for (double c : kDefaultCosts) {
        for (double b : kDefaultLevels) {
            const BacktestReport r = run_backtest(m, {c, b});
            double total = 0, losses = 0;
            int nl = 0, idle = 0;
            std::vector<double> daily;
            for (int t = 0; t < 20; ++t) {
                const TradeDecision d = enumerate(m.candidates[t], c, b);
                double p = 0;
                if (d.direction == Direction::NoTrade) {
                    ++idle;
                } else {
                    const double y = m.realized(t, d.spread - 1);
                    p = d.direction == Direction::DischargeFirst ? (y - c) * b : (-y - c) * (1 - b);
                }
                daily.push_back(p);
                total += p;
                if (p < 0) {
                    ++nl;
                    losses += p;
                }
            }
            REQUIRE(r.total == total);
            REQUIRE(r.loss_days == nl);
            REQUIRE(r.loss_total == losses);
            REQUIRE(r.no_trade_days == idle);
            REQUIRE(r.daily == daily);
            REQUIRE(std::fabs(r.loss_mean) * r.loss_days == Approx(std::fabs(r.loss_total)));
        }
    }
}

TEST_CASE("sweep layout, linearity and cheap nights") {
    const Market m = toy_market(30, 9, false);
    const auto rows = sweep(m);
    REQUIRE(rows.size() == 30);
    for (double c : kDefaultCosts) {
        int flagged = 0;
        double top = -1e300;
        for (const auto& r : rows) {
            if (r.cost != c) continue;
            flagged += r.best;
            top = std::max(top, r.report.total);
        }
        CHECK(flagged == 1);
        for (const auto& r : rows) {
            if (r.cost == c && r.best) CHECK(r.report.total == top);
        }
    }

    Market twice = m;
    for (auto& day : twice.candidates) {
        for (auto& k : day) {
            k.expected *= 2;
            k.q05 *= 2;
            k.q95 *= 2;
        }
    }
    twice.realized *= 2;
    const auto a = sweep(m, {0.0});
    const auto b = sweep(twice, {0.0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int t = 0; t < m.days(); ++t) CHECK(b[i].report.daily[t] == 2 * a[i].report.daily[t]);
    }

    const auto cheap = sweep(toy_market(40, 3, true));
    for (const auto& r : cheap) {
        if (r.best) CHECK(r.level == 0.0);
    }

    const auto dir = std::filesystem::temp_directory_path() / "spreadcast_trade_test";
    std::filesystem::create_directories(dir);
    write_sweep(rows, dir / "sweep.csv");
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "c,b,PNL,mean,stderr,n_l,l,l_bar,no_trade_days");
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 30);
}

TEST_CASE("market from archive rows") {
    std::vector<evalx::ArchiveRow> rows;
    auto add = [&](int spread, int row, double e, bool missing) {
        evalx::ArchiveRow a;
        a.spread = spread;
        a.row = row;
        a.date = "2020-01-0" + std::to_string(row);
        a.expected = e;
        a.q05 = e - 3;
        a.q95 = e + 3;
        a.realized = e + 1;
        a.missing = missing;
        rows.push_back(a);
    };
    add(5, 2, 30, false);
    add(2, 2, -40, false);
    add(5, 1, 12, true);
    add(2, 1, 20, false);
    const Market m = Market::from_archive(rows);
    REQUIRE(m.days() == 2);
    CHECK(m.dates[0] == "2020-01-01");
    CHECK(m.candidates[0].size() == 1);
    CHECK(m.candidates[1].size() == 2);
    CHECK(m.candidates[1][0].spread == 2);
    CHECK(m.realized(0, 4) == 13);
    CHECK(std::isnan(m.realized(0, 0)));
}
