#pragma once

// Thin wrappers over Boost.Math with a non-throwing, non-promoting policy,
// plus log-space CDF helpers that stay finite deep in the tails.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace spreadcast::dists::detail {

namespace bmp = boost::math::policies;

using Policy = bmp::policy<bmp::domain_error<bmp::errno_on_error>,
                           bmp::pole_error<bmp::errno_on_error>,
                           bmp::overflow_error<bmp::errno_on_error>,
                           bmp::evaluation_error<bmp::errno_on_error>,
                           bmp::promote_double<false>>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kLn2 = std::numbers::ln2;

inline double lgam(double x) { return boost::math::lgamma(x, Policy{}); }

inline double lbeta(double a, double b) { return lgam(a) + lgam(b) - lgam(a + b); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double norm_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, Policy{});
}

/// log Phi(x); switches to the asymptotic series below x = -37 where erfc
/// underflows.
inline double log_norm_cdf(double x) {
    if (x > -37.0) {
        if (x > 5.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
        return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    }
    const double x2 = x * x;
    const double inv = 1.0 / x2;
    const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

/// log of the regularized upper incomplete gamma Q(a, x) for x >= 0.
inline double log_gamma_q(double a, double x) {
    const double q = boost::math::gamma_q(a, x, Policy{});
    if (q > 1e-280) return std::log(q);
    // Q(a,x) ~ x^(a-1) e^-x / Gamma(a) * (1 + (a-1)/x + (a-1)(a-2)/x^2 + ...)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 8; ++k) {
        term *= (a - k) / x;
        sum += term;
    }
    return (a - 1.0) * std::log(x) - x - lgam(a) + std::log(sum);
}

/// Student-t CDF with real degrees of freedom `df` > 0.
inline double t_cdf(double x, double df) {
    if (!std::isfinite(x)) return x > 0 ? 1.0 : 0.0;
    const double x2 = x * x;
    double tail;  // P(T > |x|)
    if (x2 < df) {
        tail = 0.5 * boost::math::ibetac(0.5, 0.5 * df, x2 / (df + x2), Policy{});
    } else {
        tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + x2), Policy{});
    }
    return x < 0 ? tail : 1.0 - tail;
}

inline double log_t_cdf(double x, double df) {
    if (!std::isfinite(x)) return x > 0 ? 0.0 : kNegInf;
    const double x2 = x * x;
    double tail;
    if (x2 < df) {
        tail = 0.5 * boost::math::ibetac(0.5, 0.5 * df, x2 / (df + x2), Policy{});
    } else {
        tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + x2), Policy{});
    }
    return x < 0 ? std::log(tail) : std::log1p(-tail);
}

/// log density of the standard Student t with `df` degrees of freedom;
/// `log_norm` = lgamma((df+1)/2) - lgamma(df/2) - 0.5 log(df pi).
inline double log_t_pdf(double z, double df, double log_norm) {
    return log_norm - 0.5 * (df + 1.0) * std::log1p(z * z / df);
}

inline double t_log_norm(double df) {
    return lgam(0.5 * (df + 1.0)) - lgam(0.5 * df) - 0.5 * std::log(df * std::numbers::pi);
}

/// Power exponential type 2 with scale tau^(1/tau) and shape tau: the kernel
/// exp(-|z|^tau / tau). `log_norm` = log(tau^(1-1/tau) / (2 Gamma(1/tau))).
inline double pe2_log_norm(double tau) {
    return (1.0 - 1.0 / tau) * std::log(tau) - kLn2 - lgam(1.0 / tau);
}

inline double pe2_log_pdf(double z, double tau, double log_norm) {
    return log_norm - std::pow(std::abs(z), tau) / tau;
}

inline double pe2_log_cdf(double w, double tau) {
    const double x = std::pow(std::abs(w), tau) / tau;
    if (w >= 0) {
        return std::log1p(-0.5 * boost::math::gamma_q(1.0 / tau, x, Policy{}));
    }
    return -kLn2 + log_gamma_q(1.0 / tau, x);
}

inline double pe2_cdf(double w, double tau) {
    const double x = std::pow(std::abs(w), tau) / tau;
    if (w >= 0) return 0.5 + 0.5 * boost::math::gamma_p(1.0 / tau, x, Policy{});
    return 0.5 * boost::math::gamma_q(1.0 / tau, x, Policy{});
}

}  // namespace spreadcast::dists::detail
