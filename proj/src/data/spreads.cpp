#include "spreadcast/data/spreads.hpp"

#include <cmath>
#include <string>

#include "spreadcast/errors.hpp"

namespace spreadcast::data {

using Eigen::Index;
using Eigen::MatrixXd;

SpreadId SpreadId::from_hours(int h1, int h2) {
    if (h1 < 0 || h2 > kHours - 1 || h1 >= h2) {
        throw DomainError("spread needs 0 <= h1 < h2 <= 23, got (" + std::to_string(h1) + ", " +
                          std::to_string(h2) + ")");
    }
    // spreads before row h1: sum over i < h1 of (23 - i)
    const int before = h1 * (kHours - 1) - h1 * (h1 - 1) / 2;
    return {h1, h2, before + (h2 - h1)};
}

SpreadId SpreadId::from_index(int s) {
    if (s < 1 || s > kSpreads) throw DomainError("spread index must lie in 1..276");
    int h1 = 0;
    int rest = s;
    while (rest > kHours - 1 - h1) {
        rest -= kHours - 1 - h1;
        ++h1;
    }
    return {h1, h1 + rest, s};
}

MatrixXd build_spreads(const HourlyPanel& panel) {
    const Index n = static_cast<Index>(panel.days());
    MatrixXd y(n, kSpreads);
    for (int s = 1; s <= kSpreads; ++s) {
        const SpreadId id = SpreadId::from_index(s);
        for (Index t = 0; t < n; ++t) y(t, s - 1) = panel.price[t][id.h1] - panel.price[t][id.h2];
    }
    return y;
}

MatrixXd build_features(const HourlyPanel& panel, const MatrixXd& spreads, SpreadId s) {
    const Index n = static_cast<Index>(panel.days());
    if (n < 2) throw DomainError("features need at least two days");
    MatrixXd x(n - 1, kFeatures);
    for (Index r = 0; r < n - 1; ++r) {
        const Index t = r + 1;
        const double l1 = panel.load[t][s.h1];
        const double l2 = panel.load[t][s.h2];
        x(r, 0) = spreads(t - 1, s.index - 1);
        x(r, 1) = panel.gas[t];
        x(r, 2) = panel.coal[t];
        x(r, 3) = panel.wind[t][s.h1] - panel.wind[t][s.h2];
        x(r, 4) = panel.solar[t][s.h1] - panel.solar[t][s.h2];
        x(r, 5) = panel.dummy[t];
        x(r, 6) = l1 - l2;
        x(r, 7) = 0.5 * (l1 * l1 - l2 * l2);
    }
    return x;
}

SpreadPanel make_spread_panel(const HourlyPanel& panel) {
    const MatrixXd all = build_spreads(panel);
    SpreadPanel out;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.y = all.bottomRows(all.rows() - 1);
    out.x.reserve(kSpreads);
    for (int s = 1; s <= kSpreads; ++s) out.x.push_back(build_features(panel, all, SpreadId::from_index(s)));
    return out;
}

std::vector<double> SpreadPanel::series(int s, Index first, Index count) const {
    if (first < 0 || count < 0 || first + count > rows()) throw DomainError("series range out of bounds");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) v[i] = y(first + i, s - 1);
    return v;
}

gamlss::DesignMatrix SpreadPanel::design(int s, Index first, Index count) const {
    if (first < 0 || count < 2 || first + count > rows()) throw DomainError("design range out of bounds");
    const MatrixXd block = x[s - 1].middleRows(first, count);
    // keep a column only if it adds rank to what is kept so far
    MatrixXd kept = MatrixXd::Ones(count, 1);
    std::vector<int> ids;
    for (int j = 0; j < kFeatures; ++j) {
        const auto col = block.col(j);
        if (col.maxCoeff() == col.minCoeff()) continue;
        const double m = col.mean();
        const double sd = std::sqrt((col.array() - m).square().mean());
        MatrixXd trial(count, kept.cols() + 1);
        trial << kept, (col.array() - m).matrix() / sd;
        Eigen::ColPivHouseholderQR<MatrixXd> qr(trial);
        qr.setThreshold(1e-9);
        if (qr.rank() < trial.cols()) continue;
        kept = std::move(trial);
        ids.push_back(j + 1);
    }
    MatrixXd cov(count, static_cast<Index>(ids.size()));
    for (std::size_t k = 0; k < ids.size(); ++k) cov.col(k) = block.col(ids[k] - 1);
    return gamlss::DesignMatrix(std::move(cov), std::move(ids));
}

gamlss::CovariateRow SpreadPanel::covariates(int s, Index row) const {
    gamlss::CovariateRow r = gamlss::empty_row();
    for (int j = 0; j < kFeatures; ++j) r[j + 1] = x[s - 1](row, j);
    return r;
}

Split split(int days) {
    if (days < 4) throw DomainError("split needs at least 4 days");
    Split sp;
    if (days == 1917) {
        sp.train_last = 1150;
        sp.validation_last = 1534;
    } else {
        sp.train_last = days * 6 / 10;
        sp.validation_last = sp.train_last + days * 2 / 10;
    }
    sp.validation_first = sp.train_last + 1;
    sp.test_first = sp.validation_last + 1;
    sp.test_last = days;
    return sp;
}

}  // namespace spreadcast::data
