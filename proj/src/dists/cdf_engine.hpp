#pragma once

#include <array>
#include <functional>
#include <vector>

namespace spreadcast::dists::detail {

/// CDF and quantile of a standardized density by piecewise Chebyshev
/// quadrature.
///
/// Work is done in u = asinh(z). Each half-line is cut into panels of width
/// kStep in u, built lazily outward from 0. A panel samples the integrand
/// g(u) = f(sinh u) cosh u at kNodes Chebyshev points and is bisected until
/// the trailing coefficients are negligible; its antiderivative is then
/// available in closed form, so CDF values and quantile solves inside a
/// built panel need no further density evaluations. The two half-line masses
/// come from exp-sinh quadrature and normalise the result.
class CdfEngine {
public:
    static constexpr int kNodes = 16;
    static constexpr double kStep = 0.25;
    static constexpr int kMaxPanels = 114;  // |z| up to sinh(28.5) ~ 1.2e12
    static constexpr int kMaxIterations = 200;

    explicit CdfEngine(std::function<double(double)> density);

    double cdf(double z);

    /// Throws QuantileFailure when the target lies beyond the panel cap or
    /// the root search exceeds kMaxIterations.
    double quantile(double level);

    double total_mass() const noexcept { return total_; }

private:
    struct Leaf {
        double a = 0.0, b = 0.0;     // u-interval
        double before = 0.0;         // mass on [0, a]
        double mass = 0.0;           // mass on [a, b]
        std::array<double, kNodes> c{};       // integrand, Chebyshev basis on [-1, 1]
        std::array<double, kNodes + 1> F{};   // antiderivative, F(-1) = 0
    };
    struct Side {
        int sign = 1;
        int panels = 0;
        std::vector<Leaf> leaves;
        double total() const { return leaves.empty() ? 0.0 : leaves.back().before + leaves.back().mass; }
    };

    double g(const Side& side, double u) const;
    void build(Side& side, double a, double b, int depth);
    bool extend(Side& side);
    /// mass on [0, |u|] of `side`, extending panels as needed; false past the cap
    bool mass_to(Side& side, double u, double& out);
    double solve(Side& side, double need, double level);
    double tail_above(double z) const;
    double tail_below(double z) const;

    std::function<double(double)> f_;
    Side pos_{+1, 0, {}};
    Side neg_{-1, 0, {}};
    double left0_ = 0.0;   // mass on (-inf, 0]
    double right0_ = 0.0;  // mass on [0, inf)
    double total_ = 1.0;
};

}  // namespace spreadcast::dists::detail
