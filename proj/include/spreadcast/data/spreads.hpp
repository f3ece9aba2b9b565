#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spreadcast/data/panel.hpp"
#include "spreadcast/gamlss/design.hpp"

namespace spreadcast::data {

inline constexpr int kSpreads = kHours * (kHours - 1) / 2;  // 276
inline constexpr int kFeatures = 8;

/// Hour pair h1 < h2 with its 1-based index, h1-major.
struct SpreadId {
    int h1 = 0;
    int h2 = 1;
    int index = 1;

    static SpreadId from_hours(int h1, int h2);  // DomainError unless 0 <= h1 < h2 <= 23
    static SpreadId from_index(int s);           // DomainError unless 1 <= s <= 276
};

/// T x 276, column s - 1 holds price(h1) - price(h2).
Eigen::MatrixXd build_spreads(const HourlyPanel& panel);

/// (T - 1) x 8 covariates x1..x8 for one spread; row r describes day r + 1
/// (the first day only feeds the lag x1).
Eigen::MatrixXd build_features(const HourlyPanel& panel, const Eigen::MatrixXd& spreads, SpreadId s);

/// Spreads and covariates aligned after the lag drop: row r is day r + 1 of
/// the panel.
struct SpreadPanel {
    std::vector<Date> dates;
    Eigen::MatrixXd y;               // rows x 276
    std::vector<Eigen::MatrixXd> x;  // 276 matrices, rows x 8

    Eigen::Index rows() const noexcept { return y.rows(); }
    std::vector<double> series(int s, Eigen::Index first, Eigen::Index count) const;
    /// Design over rows [first, first + count) with every covariate column
    /// except those constant over that range (ids keep their x1..x8 names).
    gamlss::DesignMatrix design(int s, Eigen::Index first, Eigen::Index count) const;
    gamlss::CovariateRow covariates(int s, Eigen::Index row) const;
};

SpreadPanel make_spread_panel(const HourlyPanel& panel);

/// Boundaries on 1-based day indices of the panel. Training starts at day 2
/// because day 1 is consumed by the lag.
struct Split {
    int train_first = 2, train_last = 0;
    int validation_first = 0, validation_last = 0;
    int test_first = 0, test_last = 0;

    int train_length() const noexcept { return train_last - train_first + 1; }
    int validation_length() const noexcept { return validation_last - validation_first + 1; }
    int test_length() const noexcept { return test_last - test_first + 1; }
};

/// Explicit boundaries 1150 / 1534 for T = 1917, floor 60/20/20 otherwise.
Split split(int days);

}  // namespace spreadcast::data
