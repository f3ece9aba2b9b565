#pragma once

namespace spreadcast::dists {

/// Kurtosis values above this are clamped before any expected-value formula.
inline constexpr double kTauCap = 100.0;

/// One day's latent moments (mu, sigma, nu, tau) of a spread density.
/// sigma > 0 and tau > 0 are enforced at construction (DomainError).
class ParamVector {
public:
    ParamVector(double mu, double sigma, double nu = 0.0, double tau = 1.0);

    double mu() const noexcept { return mu_; }
    double sigma() const noexcept { return sigma_; }
    double nu() const noexcept { return nu_; }
    double tau() const noexcept { return tau_; }

    /// Component k in (mu, sigma, nu, tau) order.
    double operator[](int k) const noexcept;

    ParamVector with_tau(double tau) const { return {mu_, sigma_, nu_, tau}; }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    double mu_;
    double sigma_;
    double nu_;
    double tau_;
};

/// Jones-Faddy shape pair behind the ST5 (nu, tau) parameterisation.
/// `no_root` marks the b = 0 fallback when the bracket holds no sign change.
struct St5Shape {
    double a = 0.0;
    double b = 0.0;
    bool no_root = false;
};

}  // namespace spreadcast::dists
