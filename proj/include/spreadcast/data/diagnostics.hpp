#pragma once

#include <span>

#include <Eigen/Dense>

#include "spreadcast/data/spreads.hpp"

namespace spreadcast::data {

struct AdfResult {
    double statistic = 0.0;
    double critical_1pct = 0.0;
    bool stationary = false;  // statistic below the 1% critical value
    int observations = 0;     // rows in the test regression
};

/// Dickey-Fuller regression with constant, linear trend and `lags` lagged
/// differences. The 1% critical value is the constant-plus-trend response
/// surface of MacKinnon (2010). Throws DomainError for short series and
/// SingularDesign for degenerate ones.
AdfResult adf_test(std::span<const double> series, int lags = 10);

/// Population-moment skewness m3 / m2^1.5 and excess kurtosis m4 / m2^2 - 3.
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

struct DescriptiveStats {
    Eigen::MatrixXd skewness;     // 24 x 24, entry (h1, h2) for h1 < h2, NaN elsewhere
    Eigen::MatrixXd kurtosis;     // same layout, excess kurtosis
    Eigen::MatrixXd covariance;   // 24 x 24 sample covariance of hourly prices
    Eigen::MatrixXd correlation;
};

/// Throws DomainError when fewer than 4 rows are available.
DescriptiveStats descriptive_stats(const SpreadPanel& spreads, const HourlyPanel& panel);

}  // namespace spreadcast::data
