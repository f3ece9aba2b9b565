#pragma once

// Reference computations for tests. Deliberately independent of the library
// numerics: plain adaptive Simpson, bisection, and direct formulas.

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

/// Adaptive Simpson on a finite interval, pre-split into `pieces` panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double eps = 1e-13, int pieces = 16) {
    double total = 0.0;
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + i * h;
        const double hi = lo + h;
        const double fa = f(lo);
        const double fb = f(hi);
        const double fm = f(0.5 * (lo + hi));
        const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(f, lo, hi, fa, fm, fb, whole, eps / pieces, 40);
    }
    return total;
}

/// Integral of f over [1, inf) via z = exp(u), truncated at u = umax.
inline double upper_tail(const std::function<double(double)>& f, double eps = 1e-13,
                         double umax = 700.0) {
    return simpson([&f](double u) { const double z = std::exp(u); return f(z) * z; }, 0.0, umax,
                   eps, 700);
}

/// Integral of f over the real line: [-1, 1] directly, the tails after z = +-exp(u).
inline double real_line(const std::function<double(double)>& f, double eps = 1e-13) {
    const double mid = simpson(f, -1.0, 1.0, eps, 32);
    const double hi = upper_tail(f, eps);
    const double lo = upper_tail([&f](double z) { return f(-z); }, eps);
    return lo + mid + hi;
}

/// Integral of f over (-inf, x].
inline double below(const std::function<double(double)>& f, double x, double eps = 1e-13) {
    if (x <= -1.0) {
        const double umax = 700.0;
        const double u0 = std::log(-x);
        if (u0 >= umax) return 0.0;
        return simpson([&f](double u) { const double z = std::exp(u); return f(-z) * z; }, u0,
                       umax, eps, 140);
    }
    const double left = upper_tail([&f](double z) { return f(-z); }, eps);
    if (x <= 1.0) return left + simpson(f, -1.0, x, eps, 32);
    const double mid = simpson(f, -1.0, 1.0, eps, 32);
    const double u1 = std::log(x);
    return left + mid +
           simpson([&f](double u) { const double z = std::exp(u); return f(z) * z; }, 0.0, u1,
                   eps, 64);
}

/// Bisection for g(x) = 0 with g increasing, on a bracket [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo, double hi,
                     int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        if (g(m) < 0) {
            lo = m;
        } else {
            hi = m;
        }
    }
    return 0.5 * (lo + hi);
}

/// ST5 nu-equation residual.
inline double st5_nu_residual(double b, double tau, double nu) {
    return 2.0 * (1.0 - b * tau) / std::sqrt(2.0 * b * (2.0 - b * tau)) - nu;
}

/// b from bisection over (0, 2/tau); g is decreasing in b.
inline double st5_b_bisect(double nu, double tau) {
    return bisect([&](double b) { return -st5_nu_residual(b, tau, nu); }, 1e-300, 2.0 / tau);
}

}  // namespace oracle
