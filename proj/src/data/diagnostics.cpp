#include "spreadcast/data/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "spreadcast/errors.hpp"

namespace spreadcast::data {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// MacKinnon (2010), constant + trend, 1%: b0 + b1/N + b2/N^2 + b3/N^3
constexpr double kCt1[4] = {-3.95877, -9.0531, -28.428, -134.155};

struct Moments {
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(std::span<const double> x) {
    if (x.size() < 4) throw DomainError("moments need at least 4 values");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    Moments m;
    for (double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        m.m2 += d2;
        m.m3 += d2 * d;
        m.m4 += d2 * d2;
    }
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

}  // namespace

AdfResult adf_test(std::span<const double> y, int lags) {
    const Index n = static_cast<Index>(y.size());
    if (lags < 0 || n <= 12 + lags) {
        throw DomainError("adf test needs more than " + std::to_string(12 + lags) + " observations");
    }
    const Index rows = n - 1 - lags;
    const Index cols = 3 + lags;
    MatrixXd x(rows, cols);
    VectorXd dy(rows);
    for (Index r = 0; r < rows; ++r) {
        const Index t = r + lags + 1;
        dy(r) = y[t] - y[t - 1];
        x(r, 0) = y[t - 1];
        x(r, 1) = 1.0;
        x(r, 2) = static_cast<double>(t);
        for (int i = 1; i <= lags; ++i) x(r, 2 + i) = y[t - i] - y[t - i - 1];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < cols) throw SingularDesign("adf regression is rank deficient");
    const VectorXd beta = qr.solve(dy);
    const double s2 = (dy - x * beta).squaredNorm() / static_cast<double>(rows - cols);
    const MatrixXd xtx_inv = (x.transpose() * x).inverse();
    const double se = std::sqrt(s2 * xtx_inv(0, 0));
    if (!(se > 0.0) || !std::isfinite(se)) throw SingularDesign("adf regression has zero residual variance");

    AdfResult out;
    out.statistic = beta(0) / se;
    out.observations = static_cast<int>(rows);
    const double inv = 1.0 / static_cast<double>(rows);
    out.critical_1pct = kCt1[0] + inv * (kCt1[1] + inv * (kCt1[2] + inv * kCt1[3]));
    out.stationary = out.statistic < out.critical_1pct;
    return out;
}

double skewness(std::span<const double> x) {
    const Moments m = central_moments(x);
    if (m.m2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    const Moments m = central_moments(x);
    if (m.m2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

DescriptiveStats descriptive_stats(const SpreadPanel& spreads, const HourlyPanel& panel) {
    if (spreads.rows() < 4 || panel.days() < 4) throw DomainError("descriptive statistics need 4 rows");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    DescriptiveStats out;
    out.skewness = MatrixXd::Constant(kHours, kHours, nan);
    out.kurtosis = MatrixXd::Constant(kHours, kHours, nan);
    for (int s = 1; s <= kSpreads; ++s) {
        const SpreadId id = SpreadId::from_index(s);
        const auto col = spreads.series(s, 0, spreads.rows());
        out.skewness(id.h1, id.h2) = skewness(col);
        out.kurtosis(id.h1, id.h2) = excess_kurtosis(col);
    }
    const Index n = static_cast<Index>(panel.days());
    MatrixXd p(n, kHours);
    for (Index t = 0; t < n; ++t) {
        for (int h = 0; h < kHours; ++h) p(t, h) = panel.price[t][h];
    }
    const MatrixXd c = p.rowwise() - p.colwise().mean();
    out.covariance = c.transpose() * c / static_cast<double>(n - 1);
    const VectorXd sd = out.covariance.diagonal().cwiseSqrt();
    out.correlation = out.covariance.array() / (sd * sd.transpose()).array();
    return out;
}

}  // namespace spreadcast::data
