#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spreadcast/data/spreads.hpp"
#include "spreadcast/evalx/scoring.hpp"
#include "spreadcast/gamlss/gamlss.hpp"

namespace spreadcast::evalx {

/// One-step-ahead forecast for one panel row.
struct StepForecast {
    int step = 0;            // 0-based position in the horizon
    int row = 0;             // spread-panel row being forecast
    bool missing = false;    // fit or prediction failed
    std::string error;       // error kind when missing
    std::optional<dists::ParamVector> params;
    double expected = 0.0;   // NaN when missing
    QuantileGrid grid;
    double realized = 0.0;
    double score = 0.0;      // NaN when missing or the grid failed
};

struct RollingConfig {
    int window = 1534;
    int horizon = 383;
    int first_row = 0;       // row of the first forecast target
    int max_missing = 200;   // more missing steps mark the spread unavailable
    bool warm_start = true;  // start each window from the previous window's fits
    gamlss::FitConfig fit;
};

struct RollingResult {
    int spread = 0;
    dists::Family family = dists::Family::Normal;
    std::vector<StepForecast> steps;
    int missing = 0;
    bool unavailable = false;
};

/// Specify and fit on rows [row - window, row) and forecast `row`, for
/// row = first_row .. first_row + horizon - 1. Per-step failures are
/// recorded, not thrown. DomainError when the panel is too short.
/// Steps run in order, so warm starts keep the run deterministic.
RollingResult rolling_window_run(const data::SpreadPanel& panel, int spread, dists::Family family,
                                 const RollingConfig& config);

/// Forecast of one row from a fitted model, with the failure bookkeeping of
/// the rolling run.
StepForecast forecast_row(const gamlss::FittedModel& model, const data::SpreadPanel& panel, int spread,
                          int row);

/// One CSV row per (spread, step) with parameters, expected value, tier,
/// the 5% and 95% quantiles, realized value and pinball score.
void write_archive(const std::vector<RollingResult>& results, const data::SpreadPanel& panel,
                   const std::filesystem::path& file);

struct ArchiveRow {
    int spread = 0;
    dists::Family family = dists::Family::Normal;
    int step = 0;
    int row = 0;
    std::string date;
    bool missing = false;
    Tier tier = Tier::Failed;
    double mu = 0, sigma = 0, nu = 0, tau = 0;
    double expected = 0.0;
    double q05 = 0.0, q95 = 0.0;
    double realized = 0.0;
    double score = 0.0;
    bool unavailable = false;
};

/// Throws MissingArchive when the file does not exist, SchemaError when it is malformed.
std::vector<ArchiveRow> read_archive(const std::filesystem::path& file);

}  // namespace spreadcast::evalx
