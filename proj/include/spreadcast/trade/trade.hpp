#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spreadcast/evalx/rolling.hpp"
#include "spreadcast/evalx/scoring.hpp"

namespace spreadcast::trade {

enum class Direction {
    DischargeFirst,  // E > 0: sell the earlier hour, buy back later
    ChargeFirst,     // E < 0: buy the earlier hour, sell later
    NoTrade
};

/// Forecast of one spread on one day. NaN quantiles mean the grid failed.
struct Candidate {
    int spread = 0;
    double expected = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
};

struct TradeConfig {
    double cost = 10.0;   // c, EUR/MWh round trip
    double level = 0.0;   // b, opening battery level in [0, 1)
};

struct TradeDecision {
    int spread = 0;
    Direction direction = Direction::NoTrade;
    double forecast_profit = 0.0;
    int gate_level = 0;      // 5 or 95
    double gate_value = 0.0;
};

/// (E - c) b for E > 0, (|E| - c)(1 - b) for E < 0, 0 for E = 0.
double candidate_profit(double expected, double cost, double level);

/// Uses q05 when E > 0 and q95 otherwise; passes iff q lies beyond c on the
/// side of E (q05 > c, or q95 < -c). A failed quantile (NaN) counts as 0 and
/// fails.
bool risk_gate(double expected, double q05, double q95, double cost);
bool risk_gate(const evalx::QuantileGrid& grid, double expected, double cost);

/// Best gated candidate by forecast profit, ties to the lowest spread index.
/// Candidates with a zero or non-finite expected value are skipped.
TradeDecision select_trade(std::span<const Candidate> candidates, const TradeConfig& config);

/// (Y - c) b after a discharge-first trade, (-Y - c)(1 - b) after a
/// charge-first trade, 0 without a trade.
double realized_pnl(double realized, Direction direction, double cost, double level);

struct BacktestReport {
    double total = 0.0;
    double mean = 0.0;        // total over every day of the horizon
    double stderr_mean = 0.0; // sample sd of daily PNL / sqrt(N)
    int loss_days = 0;        // n_l
    double loss_total = 0.0;  // l
    double loss_mean = 0.0;   // l_bar, 0 without losses
    int no_trade_days = 0;
    int days = 0;
    std::vector<double> daily;
};

/// `realized` is days x 276 (column s - 1). Throws EmptyHorizon for no days
/// and DomainError when a traded spread has no realized value.
BacktestReport backtest(std::span<const TradeDecision> decisions, const Eigen::MatrixXd& realized,
                        const TradeConfig& config);

/// Forecast candidates and realized spreads per trading day.
struct Market {
    std::vector<std::string> dates;
    std::vector<std::vector<Candidate>> candidates;
    Eigen::MatrixXd realized;  // days x 276, NaN when unknown

    int days() const noexcept { return static_cast<int>(dates.size()); }
    static Market from_archive(const std::vector<evalx::ArchiveRow>& rows);
};

BacktestReport run_backtest(const Market& market, const TradeConfig& config);

struct SweepRow {
    double cost = 0.0;
    double level = 0.0;
    BacktestReport report;
    bool best = false;  // highest total PNL for this cost, first b on ties
};

inline const std::vector<double> kDefaultCosts = {5.0, 10.0, 15.0};
inline const std::vector<double> kDefaultLevels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

std::vector<SweepRow> sweep(const Market& market, const std::vector<double>& costs = kDefaultCosts,
                            const std::vector<double>& levels = kDefaultLevels);

/// Columns c, b, PNL, mean, stderr, n_l, l, l_bar, no_trade_days.
void write_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

}  // namespace spreadcast::trade
