#include "spreadcast/evalx/scoring.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"

namespace spreadcast::evalx {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool try_tier(const std::function<double(double)>& quantile, int lo, int hi, QuantileGrid& out) {
    out.levels.clear();
    out.values.clear();
    for (int a = lo; a <= hi; ++a) {
        double v;
        try {
            v = quantile(a / 100.0);
        } catch (const QuantileFailure&) {
            return false;
        }
        if (!std::isfinite(v) || (!out.values.empty() && !(v > out.values.back()))) return false;
        out.levels.push_back(a);
        out.values.push_back(v);
    }
    return true;
}

}  // namespace

double QuantileGrid::at(int level) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level) return values[i];
    }
    return kNaN;
}

double pinball_value(double q, int a, double y) {
    const double tau = a / 100.0;
    return y < q ? (1.0 - tau) * (q - y) : tau * (y - q);
}

QuantileGrid extract_quantiles(const std::function<double(double)>& quantile) {
    QuantileGrid g;
    constexpr std::pair<int, Tier> tiers[] = {{1, Tier::Full}, {2, Tier::Trim97}, {3, Tier::Trim95}};
    for (const auto& [trim, tier] : tiers) {
        if (try_tier(quantile, trim, 100 - trim, g)) {
            g.tier = tier;
            return g;
        }
    }
    g.levels.clear();
    g.values.clear();
    g.tier = Tier::Failed;
    return g;
}

QuantileGrid extract_quantiles(dists::Family family, const dists::ParamVector& p) {
    const dists::Distribution d(family, p);
    return extract_quantiles([&d](double level) { return d.quantile(level); });
}

double pinball_score(const QuantileGrid& grid, double y) {
    if (!grid.ok() || grid.levels.empty()) throw DomainError("pinball score of a failed quantile grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.levels.size(); ++i) sum += pinball_value(grid.values[i], grid.levels[i], y);
    return sum / static_cast<double>(grid.levels.size());
}

PinballReport pinball_measure(std::span<const double> scores) {
    PinballReport r;
    double sum = 0.0;
    for (double s : scores) {
        if (std::isnan(s)) {
            ++r.omitted;
        } else {
            sum += s;
            ++r.evaluated;
        }
    }
    if (r.evaluated == 0) throw EmptyHorizon("no evaluated step in the horizon");
    r.measure = sum / r.evaluated;
    return r;
}

double rmse(std::span<const double> forecast, std::span<const double> realized) {
    if (forecast.size() != realized.size()) throw DomainError("rmse series differ in length");
    double ss = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        if (!std::isfinite(forecast[i]) || !std::isfinite(realized[i])) continue;
        const double e = forecast[i] - realized[i];
        ss += e * e;
        ++n;
    }
    return n == 0 ? kNaN : std::sqrt(ss / n);
}

dists::Family select_best(const std::vector<std::pair<dists::Family, double>>& measures) {
    const std::pair<dists::Family, double>* best = nullptr;
    for (const auto& m : measures) {
        if (!std::isfinite(m.second)) continue;
        if (!best || m.second < best->second ||
            (m.second == best->second && dists::selection_rank(m.first) < dists::selection_rank(best->first))) {
            best = &m;
        }
    }
    if (!best) throw NoCandidate("no family has a finite pinball measure");
    return best->first;
}

double relative_gap(double a, double b) { return std::abs(a - b) / b; }

DmResult dm_test(std::span<const double> s1, std::span<const double> s2) {
    if (s1.size() != s2.size()) throw DomainError("dm test series differ in length");
    std::vector<double> d;
    d.reserve(s1.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        if (std::isnan(s1[i]) || std::isnan(s2[i])) continue;
        d.push_back(std::abs(s1[i]) - std::abs(s2[i]));
    }
    const int n = static_cast<int>(d.size());
    if (n < 10) throw DomainError("dm test needs at least 10 paired steps, got " + std::to_string(n));
    DmResult r;
    r.horizon = n;
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= n;
    if (std::sqrt(var) <= 1e-12 * std::abs(mean) || var == 0.0) {
        if (mean == 0.0) return r;
        throw DegenerateVariance("loss differential is constant and nonzero");
    }
    const double h = 1.0;
    const double dm = mean / std::sqrt(var / n);
    r.statistic = dm * std::sqrt((n + 1.0 - 2.0 * h + h * (h - 1.0) / n) / n);
    const boost::math::students_t t(n - 1.0);
    r.p_value = boost::math::cdf(t, r.statistic);
    return r;
}

}  // namespace spreadcast::evalx
