#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "spreadcast/dists/family.hpp"
#include "spreadcast/dists/params.hpp"

namespace spreadcast::dists {

namespace detail {
class CdfEngine;
}

// Free-function surface. All of these are pure; the CDF of the families
// without a closed form (SEP1, SEP2, ST1, ST2) is computed by adaptive
// quadrature of the density.

double pdf(Family family, const ParamVector& p, double y);
double log_likelihood(Family family, const ParamVector& p, double y);
double cdf(Family family, const ParamVector& p, double y);

/// Throws QuantileFailure when the root search cannot bracket or converge.
double quantile(Family family, const ParamVector& p, double level);

/// E(Y) = mu + sigma E(Z), with tau capped at kTauCap and the degenerate-input
/// guards applied (see expected_value.cpp). Never throws for valid `p`.
double expected_value(Family family, const ParamVector& p);

/// Solves nu = 2(1 - b tau) / sqrt(2b(2 - b tau)), a = 2/tau - b.
St5Shape st5_shape_from_nu_tau(double nu, double tau);

/// Inverse-CDF draw; identical output for identical seed.
double sample(Family family, const ParamVector& p, std::uint64_t seed);

/// `n` inverse-CDF draws from one engine (quantiles solved in sorted order).
std::vector<double> sample_n(Family family, const ParamVector& p, std::size_t n,
                             std::mt19937_64& rng);

/// Uniform variate in (0,1) from the top 53 bits of one engine output.
double open_uniform(std::mt19937_64& rng) noexcept;

/// Log-density without argument validation. Returns -inf for parameters
/// outside the support instead of throwing; used by the likelihood loops.
double log_density(Family family, double y, double mu, double sigma, double nu,
                   double tau) noexcept;

/// A family bound to one parameter vector. Keeps the quadrature panels of
/// the CDF between calls, so repeated quantiles are cheap. Not thread-safe;
/// copies start with an empty cache.
class Distribution {
public:
    Distribution(Family family, const ParamVector& p);
    ~Distribution();
    Distribution(const Distribution& other);
    Distribution& operator=(const Distribution& other);
    Distribution(Distribution&&) noexcept;
    Distribution& operator=(Distribution&&) noexcept;

    Family family() const noexcept { return family_; }
    const ParamVector& params() const noexcept { return params_; }

    double pdf(double y) const;
    double log_pdf(double y) const;
    double cdf(double y) const;
    double quantile(double level) const;

    /// Quantiles for ascending `levels`; throws QuantileFailure on the first
    /// level that fails.
    std::vector<double> quantiles(std::span<const double> levels) const;

    double expected_value() const;

private:
    double standardized_cdf(double z) const;
    double standardized_quantile(double level) const;
    detail::CdfEngine& engine() const;

    Family family_;
    ParamVector params_;
    mutable std::unique_ptr<detail::CdfEngine> engine_;
};

}  // namespace spreadcast::dists
