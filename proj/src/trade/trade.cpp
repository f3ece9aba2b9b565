#include "spreadcast/trade/trade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spreadcast/data/spreads.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/util/csv.hpp"

namespace spreadcast::trade {

double candidate_profit(double expected, double cost, double level) {
    if (expected > 0) return (expected - cost) * level;
    if (expected < 0) return (std::abs(expected) - cost) * (1.0 - level);
    return 0.0;
}

bool risk_gate(double expected, double q05, double q95, double cost) {
    double q = expected > 0 ? q05 : -q95;
    if (!std::isfinite(q)) q = 0.0;
    return q > cost;
}

bool risk_gate(const evalx::QuantileGrid& grid, double expected, double cost) {
    return risk_gate(expected, grid.at(5), grid.at(95), cost);
}

TradeDecision select_trade(std::span<const Candidate> candidates, const TradeConfig& cfg) {
    TradeDecision best;
    bool found = false;
    for (const Candidate& c : candidates) {
        if (!std::isfinite(c.expected) || c.expected == 0.0) continue;
        if (!risk_gate(c.expected, c.q05, c.q95, cfg.cost)) continue;
        const double profit = candidate_profit(c.expected, cfg.cost, cfg.level);
        if (found && (profit < best.forecast_profit ||
                      (profit == best.forecast_profit && c.spread > best.spread))) {
            continue;
        }
        found = true;
        best.spread = c.spread;
        best.forecast_profit = profit;
        best.direction = c.expected > 0 ? Direction::DischargeFirst : Direction::ChargeFirst;
        best.gate_level = c.expected > 0 ? 5 : 95;
        best.gate_value = c.expected > 0 ? c.q05 : c.q95;
    }
    return best;
}

double realized_pnl(double realized, Direction direction, double cost, double level) {
    switch (direction) {
        case Direction::DischargeFirst: return (realized - cost) * level;
        case Direction::ChargeFirst: return (-realized - cost) * (1.0 - level);
        case Direction::NoTrade: return 0.0;
    }
    return 0.0;
}

BacktestReport backtest(std::span<const TradeDecision> decisions, const Eigen::MatrixXd& realized,
                        const TradeConfig& cfg) {
    const int n = static_cast<int>(decisions.size());
    if (n == 0) throw EmptyHorizon("backtest over an empty horizon");
    if (realized.rows() < n) throw DomainError("realized spreads cover fewer days than the decisions");
    BacktestReport r;
    r.days = n;
    r.daily.resize(n);
    for (int t = 0; t < n; ++t) {
        const TradeDecision& d = decisions[t];
        double pnl = 0.0;
        if (d.direction == Direction::NoTrade) {
            ++r.no_trade_days;
        } else {
            const double y = realized(t, d.spread - 1);
            if (!std::isfinite(y)) {
                throw DomainError("no realized value for spread " + std::to_string(d.spread) + " on day " +
                                  std::to_string(t));
            }
            pnl = realized_pnl(y, d.direction, cfg.cost, cfg.level);
        }
        r.daily[t] = pnl;
        r.total += pnl;
        if (pnl < 0) {
            ++r.loss_days;
            r.loss_total += pnl;
        }
    }
    r.mean = r.total / n;
    double ss = 0.0;
    for (double v : r.daily) ss += (v - r.mean) * (v - r.mean);
    r.stderr_mean = n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
    r.loss_mean = r.loss_days > 0 ? r.loss_total / r.loss_days : 0.0;
    return r;
}

Market Market::from_archive(const std::vector<evalx::ArchiveRow>& rows) {
    std::map<int, std::string> dates;
    for (const auto& a : rows) dates.emplace(a.row, a.date);
    Market m;
    std::map<int, int> day_of;
    for (const auto& [row, date] : dates) {
        day_of[row] = m.days();
        m.dates.push_back(date);
    }
    m.candidates.resize(m.dates.size());
    m.realized = Eigen::MatrixXd::Constant(m.days(), data::kSpreads, std::numeric_limits<double>::quiet_NaN());
    for (const auto& a : rows) {
        const int t = day_of[a.row];
        m.realized(t, a.spread - 1) = a.realized;
        if (a.missing || a.unavailable || !std::isfinite(a.expected)) continue;
        m.candidates[t].push_back({a.spread, a.expected, a.q05, a.q95});
    }
    for (auto& day : m.candidates) {
        std::sort(day.begin(), day.end(), [](const Candidate& x, const Candidate& y) { return x.spread < y.spread; });
    }
    return m;
}

BacktestReport run_backtest(const Market& market, const TradeConfig& cfg) {
    std::vector<TradeDecision> decisions;
    decisions.reserve(market.days());
    for (const auto& day : market.candidates) decisions.push_back(select_trade(day, cfg));
    return backtest(decisions, market.realized, cfg);
}

std::vector<SweepRow> sweep(const Market& market, const std::vector<double>& costs,
                            const std::vector<double>& levels) {
    std::vector<SweepRow> out;
    for (double c : costs) {
        const std::size_t first = out.size();
        for (double b : levels) {
            SweepRow row{c, b, run_backtest(market, {c, b}), false};
            out.push_back(std::move(row));
        }
        std::size_t best = first;
        for (std::size_t i = first; i < out.size(); ++i) {
            if (out[i].report.total > out[best].report.total) best = i;
        }
        if (best < out.size()) out[best].best = true;
    }
    return out;
}

void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
    csv::Writer w(file);
    w.row({"c", "b", "PNL", "mean", "stderr", "n_l", "l", "l_bar", "no_trade_days"});
    for (const auto& r : rows) {
        w.row({csv::format(r.cost), csv::format(r.level), csv::format(r.report.total), csv::format(r.report.mean),
               csv::format(r.report.stderr_mean), std::to_string(r.report.loss_days), csv::format(r.report.loss_total),
               csv::format(r.report.loss_mean), std::to_string(r.report.no_trade_days)});
    }
}

}  // namespace spreadcast::trade
