#include "cdf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "spreadcast/errors.hpp"

namespace spreadcast::dists::detail {

namespace {

constexpr int N = CdfEngine::kNodes;
constexpr double kTailTol = 1e-12;
constexpr double kCoefTol = 1e-13;
constexpr int kMaxDepth = 30;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ChebTables {
    std::array<double, N> x{};
    std::array<std::array<double, N>, N> cosines{};  // cos(pi j (k + 1/2) / N)
    ChebTables() {
        for (int k = 0; k < N; ++k) {
            x[k] = std::cos(std::numbers::pi * (k + 0.5) / N);
            for (int j = 0; j < N; ++j) cosines[j][k] = std::cos(std::numbers::pi * j * (k + 0.5) / N);
        }
    }
};

const ChebTables& tables() {
    static const ChebTables t;
    return t;
}

template <std::size_t M>
double clenshaw(const std::array<double, M>& a, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = M; k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + a[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + a[0];
}

}  // namespace

CdfEngine::CdfEngine(std::function<double(double)> density) : f_(std::move(density)) {
    left0_ = tail_below(0.0);
    right0_ = tail_above(0.0);
    total_ = left0_ + right0_;
    if (!std::isfinite(total_) || total_ <= 0.0) {
        throw EvalError("density mass is not finite and positive");
    }
}

double CdfEngine::g(const Side& side, double u) const {
    const double v = f_(side.sign * std::sinh(u)) * std::cosh(u);
    return (v > 0.0 && std::isfinite(v)) ? v : 0.0;
}

void CdfEngine::build(Side& side, double a, double b, int depth) {
    const auto& t = tables();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, N> v{};
    for (int k = 0; k < N; ++k) v[k] = g(side, mid + half * t.x[k]);

    Leaf leaf;
    leaf.a = a;
    leaf.b = b;
    double scale = 0.0;
    for (int j = 0; j < N; ++j) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += v[k] * t.cosines[j][k];
        leaf.c[j] = (j == 0 ? 1.0 : 2.0) * s / N;
        scale = std::max(scale, std::abs(leaf.c[j]));
    }
    const double tail = std::abs(leaf.c[N - 1]) + std::abs(leaf.c[N - 2]);
    const bool resolved =
        tail <= kCoefTol * scale || tail * half <= 1e-17 * total_ || depth >= kMaxDepth;
    if (!resolved) {
        build(side, a, mid, depth + 1);
        build(side, mid, b, depth + 1);
        return;
    }

    // integrate term by term: int T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1))
    auto cc = [&leaf](int k) { return k < N ? leaf.c[k] : 0.0; };
    leaf.F[1] = cc(0) - 0.5 * cc(2);
    for (int k = 2; k <= N; ++k) leaf.F[k] = (cc(k - 1) - cc(k + 1)) / (2.0 * k);
    double at_minus_one = 0.0;
    for (int k = 1; k <= N; ++k) at_minus_one += (k % 2 ? -1.0 : 1.0) * leaf.F[k];
    leaf.F[0] = -at_minus_one;
    for (auto& x : leaf.F) x *= half;
    leaf.mass = clenshaw(leaf.F, 1.0);
    leaf.before = side.total();
    side.leaves.push_back(leaf);
}

bool CdfEngine::extend(Side& side) {
    if (side.panels >= kMaxPanels) return false;
    const double a = side.panels * kStep;
    build(side, a, a + kStep, 0);
    ++side.panels;
    return true;
}

bool CdfEngine::mass_to(Side& side, double u, double& out) {
    while (side.panels == 0 || side.panels * kStep < u) {
        if (!extend(side)) return false;
    }
    auto it = std::upper_bound(side.leaves.begin(), side.leaves.end(), u,
                               [](double x, const Leaf& l) { return x < l.b; });
    if (it == side.leaves.end()) --it;
    const double half = 0.5 * (it->b - it->a);
    const double x = std::clamp((u - 0.5 * (it->a + it->b)) / half, -1.0, 1.0);
    out = it->before + clenshaw(it->F, x);
    return true;
}

double CdfEngine::cdf(double z) {
    if (std::isnan(z)) throw EvalError("cdf argument is NaN");
    const double u = std::asinh(std::abs(z));
    double mass;
    double m;
    if (z >= 0) {
        mass = mass_to(pos_, u, m) ? left0_ + m : total_ - tail_above(z);
    } else {
        mass = mass_to(neg_, u, m) ? left0_ - m : tail_below(z);
    }
    return std::clamp(mass / total_, 0.0, 1.0);
}

double CdfEngine::quantile(double level) {
    const double target = level * total_;
    if (target >= left0_) return std::sinh(solve(pos_, target - left0_, level));
    return -std::sinh(solve(neg_, left0_ - target, level));
}

// Root of (mass on [0, u]) = need by safeguarded Newton on the leaf's
// antiderivative polynomial.
double CdfEngine::solve(Side& side, double need, double level) {
    while (side.total() <= need) {
        if (!extend(side)) {
            throw QuantileFailure("quantile at level " + std::to_string(level) +
                                  " lies beyond the search bracket");
        }
    }
    auto it = std::upper_bound(side.leaves.begin(), side.leaves.end(), need,
                               [](double m, const Leaf& l) { return m < l.before + l.mass; });
    if (it == side.leaves.end()) --it;
    const Leaf& leaf = *it;
    const double half = 0.5 * (leaf.b - leaf.a);
    const double want = need - leaf.before;

    double lo = -1.0, hi = 1.0;
    double x = leaf.mass > 0 ? std::clamp(2.0 * want / leaf.mass - 1.0, -1.0, 1.0) : 0.0;
    for (int iter = 0;; ++iter) {
        if (iter == kMaxIterations) {
            throw QuantileFailure("quantile search did not converge in " +
                                  std::to_string(kMaxIterations) + " iterations");
        }
        const double r = clenshaw(leaf.F, x) - want;
        if (r == 0.0) break;
        if (r < 0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
        const double d = half * clenshaw(leaf.c, x);
        double next = d > 0 ? x - r / d : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - x) <= 1e-16;
        x = next;
        if (done) break;
    }
    return 0.5 * (leaf.a + leaf.b) + half * x;
}

double CdfEngine::tail_above(double z) const {
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    try {
        const double v = integrator.integrate(f_, z, kInf, kTailTol, nullptr, nullptr, nullptr);
        if (!std::isfinite(v)) throw EvalError("upper tail integral is not finite");
        return v;
    } catch (const EvalError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvalError(std::string("upper tail integral failed: ") + e.what());
    }
}

double CdfEngine::tail_below(double z) const {
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    try {
        const double v = integrator.integrate(f_, -kInf, z, kTailTol, nullptr, nullptr, nullptr);
        if (!std::isfinite(v)) throw EvalError("lower tail integral is not finite");
        return v;
    } catch (const EvalError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvalError(std::string("lower tail integral failed: ") + e.what());
    }
}

}  // namespace spreadcast::dists::detail
