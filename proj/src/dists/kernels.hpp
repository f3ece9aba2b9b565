#pragma once

// Standardized log-densities log f_Z(z), z = (y - mu) / sigma, with the
// per-(nu, tau) constants hoisted into the kernel. log f_Y = log f_Z - log sigma.
//
// JSU, JSUo and ST1 follow the GAMLSS reference parameterisations; SEP1, SEP2,
// ST2 and ST5 follow the skew-symmetric forms 2 f(z) G(w(z)) and the
// Jones-Faddy form respectively.

#include <cmath>
#include <optional>
#include <variant>

#include <boost/math/special_functions/beta.hpp>

#include "special.hpp"
#include "spreadcast/dists/family.hpp"
#include "spreadcast/dists/params.hpp"

namespace spreadcast::dists::detail {

struct NormalKernel {
    double log_pdf(double z) const { return -kLogSqrt2Pi - 0.5 * z * z; }
    std::optional<double> cdf(double z) const { return norm_cdf(z); }
    std::optional<double> quantile(double p) const { return norm_quantile(p); }
};

/// Johnson SU reparameterised so that mu is the mean and sigma the sd.
struct JsuKernel {
    double nu, tau, log_tau, rtau, c, shift;

    JsuKernel(double nu_, double tau_) : nu(nu_), tau(tau_), log_tau(std::log(tau_)), rtau(1.0 / tau_) {
        const double wm1 = std::expm1(rtau * rtau);
        const double w = wm1 + 1.0;
        const double omega = -nu * rtau;
        c = 1.0 / std::sqrt(0.5 * wm1 * (w * std::cosh(2.0 * omega) + 1.0));
        shift = c * std::sqrt(w) * std::sinh(omega);
    }
    double r_of(double z) const { return -nu + tau * std::asinh((z - shift) / c); }
    double log_pdf(double z) const {
        const double u = (z - shift) / c;
        const double r = -nu + tau * std::asinh(u);
        return -std::log(c) + log_tau - 0.5 * std::log1p(u * u) - kLogSqrt2Pi - 0.5 * r * r;
    }
    std::optional<double> cdf(double z) const { return norm_cdf(r_of(z)); }
    std::optional<double> quantile(double p) const {
        return shift + c * std::sinh(rtau * (norm_quantile(p) + nu));
    }
};

/// Johnson's original SU: r = nu + tau asinh(z) is standard normal.
struct JsuoKernel {
    double nu, tau, log_tau;

    JsuoKernel(double nu_, double tau_) : nu(nu_), tau(tau_), log_tau(std::log(tau_)) {}
    double log_pdf(double z) const {
        const double r = nu + tau * std::asinh(z);
        return log_tau - 0.5 * std::log1p(z * z) - kLogSqrt2Pi - 0.5 * r * r;
    }
    std::optional<double> cdf(double z) const { return norm_cdf(nu + tau * std::asinh(z)); }
    std::optional<double> quantile(double p) const {
        return std::sinh((norm_quantile(p) - nu) / tau);
    }
};

/// 2 f_PE2(z) F_PE2(nu z)
struct Sep1Kernel {
    double nu, tau, log_norm;

    Sep1Kernel(double nu_, double tau_) : nu(nu_), tau(tau_), log_norm(pe2_log_norm(tau_)) {}
    double log_pdf(double z) const {
        return kLn2 + pe2_log_pdf(z, tau, log_norm) + pe2_log_cdf(nu * z, tau);
    }
    std::optional<double> cdf(double) const { return std::nullopt; }
    std::optional<double> quantile(double) const { return std::nullopt; }
};

/// 2 f_PE2(z) Phi(sign(z) |z|^(tau/2) nu sqrt(2/tau))
struct Sep2Kernel {
    double nu, tau, log_norm, scale;

    Sep2Kernel(double nu_, double tau_)
        : nu(nu_), tau(tau_), log_norm(pe2_log_norm(tau_)), scale(nu_ * std::sqrt(2.0 / tau_)) {}
    double log_pdf(double z) const {
        const double base = pe2_log_pdf(z, tau, log_norm);
        if (base == kNegInf || scale == 0.0) return base;
        const double omega = std::copysign(std::pow(std::abs(z), 0.5 * tau), z) * scale;
        return kLn2 + base + log_norm_cdf(omega);
    }
    std::optional<double> cdf(double) const { return std::nullopt; }
    std::optional<double> quantile(double) const { return std::nullopt; }
};

/// 2 t_tau(z) T_tau(nu z)
struct St1Kernel {
    double nu, tau, log_norm;

    St1Kernel(double nu_, double tau_) : nu(nu_), tau(tau_), log_norm(t_log_norm(tau_)) {}
    double log_pdf(double z) const {
        return kLn2 + log_t_pdf(z, tau, log_norm) + log_t_cdf(nu * z, tau);
    }
    std::optional<double> cdf(double) const { return std::nullopt; }
    std::optional<double> quantile(double) const { return std::nullopt; }
};

/// 2 t_tau(z) T_{tau+1}(nu sqrt((tau+1)/(tau+z^2)) z)
struct St2Kernel {
    double nu, tau, log_norm;

    St2Kernel(double nu_, double tau_) : nu(nu_), tau(tau_), log_norm(t_log_norm(tau_)) {}
    double log_pdf(double z) const {
        const double w = nu * std::sqrt((tau + 1.0) / (tau + z * z)) * z;
        return kLn2 + log_t_pdf(z, tau, log_norm) + log_t_cdf(w, tau + 1.0);
    }
    std::optional<double> cdf(double) const { return std::nullopt; }
    std::optional<double> quantile(double) const { return std::nullopt; }
};

/// Exact, cancellation-free shape pair for the ST5 (nu, tau) map. The public
/// st5_shape_from_nu_tau runs the iterative search; this is its closed form.
inline St5Shape st5_shape_closed_form(double nu, double tau) {
    const double s = std::sqrt(nu * nu + 2.0 * tau);
    if (nu >= 0) return {(1.0 + nu / s) / tau, 2.0 / (s * (s + nu)), false};
    return {2.0 / (s * (s - nu)), (1.0 - nu / s) / tau, false};
}

/// Jones-Faddy skew t: F(z) = I_x(a, b), x = (1 + z / sqrt(a + b + z^2)) / 2.
struct St5Kernel {
    double a, b, apb, log_c;

    St5Kernel(double nu, double tau) {
        const auto shape = st5_shape_closed_form(nu, tau);
        a = shape.a;
        b = shape.b;
        apb = a + b;
        log_c = -((apb - 1.0) * kLn2 + 0.5 * std::log(apb) + lbeta(a, b));
    }
    // returns (q + z, q - z, q) without cancellation or overflow
    void split(double z, double& plus, double& minus, double& q) const {
        const double az = std::abs(z);
        q = az > 1e100 ? az * std::sqrt(1.0 + apb / az / az) : std::sqrt(apb + z * z);
        if (z >= 0) {
            plus = q + z;
            minus = apb / plus;
        } else {
            minus = q - z;
            plus = apb / minus;
        }
    }
    double log_pdf(double z) const {
        if (!std::isfinite(z)) return kNegInf;
        double plus, minus, q;
        split(z, plus, minus, q);
        const double lq = std::log(q);
        return log_c + (a + 0.5) * (std::log(plus) - lq) + (b + 0.5) * (std::log(minus) - lq);
    }
    std::optional<double> cdf(double z) const {
        double plus, minus, q;
        split(z, plus, minus, q);
        const double x = plus / (2.0 * q);
        const double y = minus / (2.0 * q);
        if (x <= 0.5) return boost::math::ibeta(a, b, x, Policy{});
        return 1.0 - boost::math::ibeta(b, a, y, Policy{});
    }
    std::optional<double> quantile(double p) const {
        // the incomplete-beta inverse does not terminate for such shapes
        constexpr double kMinShape = 1e-8, kMaxShape = 1e10;
        if (!(a > kMinShape && b > kMinShape && a < kMaxShape && b < kMaxShape)) return std::nullopt;
        double x, y;
        if (p <= 0.5) {
            x = boost::math::ibeta_inv(a, b, p, Policy{});
            y = 1.0 - x;
        } else {
            y = boost::math::ibeta_inv(b, a, 1.0 - p, Policy{});
            x = 1.0 - y;
        }
        return (x - y) * std::sqrt(apb) / (2.0 * std::sqrt(x * y));
    }
};

using Kernel = std::variant<NormalKernel, JsuKernel, JsuoKernel, Sep1Kernel, Sep2Kernel,
                            St1Kernel, St2Kernel, St5Kernel>;

inline Kernel make_kernel(Family family, double nu, double tau) {
    switch (family) {
        case Family::Normal: return NormalKernel{};
        case Family::JSU: return JsuKernel(nu, tau);
        case Family::JSUo: return JsuoKernel(nu, tau);
        case Family::SEP1: return Sep1Kernel(nu, tau);
        case Family::SEP2: return Sep2Kernel(nu, tau);
        case Family::ST1: return St1Kernel(nu, tau);
        case Family::ST2: return St2Kernel(nu, tau);
        case Family::ST5: return St5Kernel(nu, tau);
    }
    return NormalKernel{};
}

inline bool has_closed_form_cdf(Family family) {
    return family == Family::Normal || family == Family::JSU || family == Family::JSUo ||
           family == Family::ST5;
}

}  // namespace spreadcast::dists::detail
