#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

#include "special.hpp"
#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"

namespace spreadcast::dists {

namespace {

using detail::lgam;

constexpr int kSep2SeriesCap = 10;
constexpr double kSt2Tol = 0.05;
constexpr double kSt5Tol = 0.05;

double sign(double x) { return (x > 0) - (x < 0); }

double sep1_mean_z(double nu, double tau) {
    if (nu == 0.0) return 0.0;
    double p = std::pow(std::abs(nu), tau);
    if (!std::isfinite(p)) p = 1.0;  // numeric-overflow fallback
    const double ratio = std::exp(lgam(2.0 / tau) - lgam(1.0 / tau));
    const double cdf = boost::math::ibeta(1.0 / tau, 2.0 / tau, p / (1.0 + p), detail::Policy{});
    return sign(nu) * std::pow(tau, 1.0 / tau) * ratio * cdf;
}

// Series truncated at n = kSep2SeriesCap. (2n+1)!! = 1*3*5*...*(2n+1).
double sep2_mean_z(double nu, double tau) {
    if (nu == 0.0) return 0.0;
    const double nu2 = nu * nu;
    const double log_prefactor = std::numbers::ln2 + std::log(tau) / tau -
                                 0.5 * std::log(std::numbers::pi) - lgam(1.0 / tau) -
                                 (2.0 / tau + 0.5) * std::log1p(nu2);
    const double log_r = std::log(2.0 * nu2 / (1.0 + nu2));
    double log_dfact = 0.0;  // log (2n+1)!!
    double sum = 0.0;
    for (int n = 0; n <= kSep2SeriesCap; ++n) {
        if (n > 0) log_dfact += std::log(2.0 * n + 1.0);
        sum += std::exp(log_prefactor + lgam(2.0 / tau + n + 0.5) - log_dfact + n * log_r);
    }
    return nu * sum;
}

double st2_mean_z(double nu, double tau) {
    if (tau - 1.0 < kSt2Tol) return 0.0;
    return nu * std::sqrt(tau) * std::exp(lgam(0.5 * (tau - 1.0)) - lgam(0.5 * tau)) /
           (std::sqrt(std::numbers::pi) * std::sqrt(1.0 + nu * nu));
}

// Gamma(a - 0.5) diverges as a -> 0.5+, so E(Z) is reported as 0 unless both
// shapes clear 0.5 + tol.
double st5_mean_z(double nu, double tau) {
    const St5Shape s = st5_shape_from_nu_tau(nu, tau);
    if (s.no_root) return 0.0;
    if (!(s.a > 0.5 + kSt5Tol && s.b > 0.5 + kSt5Tol)) return 0.0;
    const double log_ratio = lgam(s.a - 0.5) + lgam(s.b - 0.5) - lgam(s.a) - lgam(s.b);
    return 0.5 * (s.a - s.b) * std::sqrt(s.a + s.b) * std::exp(log_ratio);
}

double jsuo_mean_z(double nu, double tau) {
    if (nu == 0.0) return 0.0;
    return -std::exp(0.5 / (tau * tau)) * std::sinh(nu / tau);
}

}  // namespace

double expected_value(Family family, const ParamVector& p) {
    const double tau = std::min(p.tau(), kTauCap);
    const double nu = p.nu();
    double ez = 0.0;
    switch (family) {
        case Family::Normal:
        case Family::JSU:
        case Family::ST1: return p.mu();
        case Family::JSUo: ez = jsuo_mean_z(nu, tau); break;
        case Family::SEP1: ez = sep1_mean_z(nu, tau); break;
        case Family::SEP2: ez = sep2_mean_z(nu, tau); break;
        case Family::ST2: ez = st2_mean_z(nu, tau); break;
        case Family::ST5: ez = st5_mean_z(nu, tau); break;
    }
    if (!std::isfinite(ez)) ez = 0.0;
    return p.mu() + p.sigma() * ez;
}

St5Shape st5_shape_from_nu_tau(double nu, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(nu)) {
        throw DomainError("st5 shape needs finite nu and tau > 0");
    }
    constexpr double eps = 1e-10;
    const double span = 2.0 / tau;
    // g is strictly decreasing on (0, 2/tau) with g' = -4 / D^3
    auto denom = [tau](double b) { return std::sqrt(2.0 * b * (2.0 - b * tau)); };
    auto g = [&](double b) { return 2.0 * (1.0 - b * tau) / denom(b) - nu; };

    double lo = eps;
    double hi = span - eps;
    const St5Shape none{span, 0.0, true};
    if (!(hi > lo)) return none;
    const double g_lo = g(lo);
    const double g_hi = g(hi);
    if (g_lo == 0.0) return {span - lo, lo, false};
    if (g_hi == 0.0) return {span - hi, hi, false};
    if ((g_lo > 0) == (g_hi > 0)) return none;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gx = g(x);
        if (gx == 0.0) break;
        if (gx > 0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * x) break;
        const double d = denom(x);
        double next = x + gx * d * d * d / 4.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    return {span - x, x, false};
}

}  // namespace spreadcast::dists
