#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spreadcast/dists/family.hpp"
#include "spreadcast/dists/params.hpp"
#include "spreadcast/gamlss/design.hpp"

namespace spreadcast::gamlss {

/// Covariate ids entering the equation of each parameter (mu, sigma, nu, tau).
using ActiveSets = std::array<std::vector<int>, kParams>;

/// Every covariate of `x` in every equation the family uses.
ActiveSets full_active_sets(dists::Family family, const DesignMatrix& x);

struct FitConfig {
    double significance = 0.05;
    int max_cycles = 200;
    /// Outer stop: relative log-likelihood change across one cycle.
    double loglik_tol = 1e-8;
    /// Newton steps per parameter equation inside one cycle.
    int inner_steps = 1;
    /// Inner stop: largest coefficient step, in standardized units.
    double coef_tol = 1e-7;
    int max_halvings = 30;
    /// Cyclic single-equation sweeps before joint Newton steps over all
    /// equations take over (none after an accepted warm start); a joint step
    /// that cannot improve falls back to one sweep.
    int rs_cycles = 2;
};

struct Equation {
    std::vector<int> active;   // covariate ids after the intercept
    Eigen::VectorXd beta;      // intercept first
    Eigen::VectorXd se;
    dists::Link link = dists::Link::Identity;
};

struct EliminationStep {
    int parameter = 0;  // 0..3
    int covariate = 0;  // id 1..8
    double p_value = 0.0;
};

struct FittedModel {
    dists::Family family = dists::Family::Normal;
    std::array<Equation, kParams> eq;
    double loglik = 0.0;
    double aic = 0.0;
    bool converged = false;
    int cycles = 0;
    int observations = 0;
    std::vector<double> loglik_trace;  // after every outer cycle
    std::vector<EliminationStep> elimination;

    int parameters() const noexcept { return dists::parameter_count(family); }
    int coefficient_count() const noexcept;
    ActiveSets active_sets() const;
};

/// Maximum-likelihood fit: cyclic Newton/Fisher updates of one parameter
/// equation at a time, then joint Newton steps on the observed information,
/// both with step halving.
///
/// `start` (optional) supplies starting coefficients by covariate id; ids it
/// lacks start at 0. Throws NonConvergence when the likelihood cannot be
/// evaluated or the response is degenerate, SingularDesign for a
/// rank-deficient equation. Hitting `max_cycles` returns converged = false.
FittedModel fit(dists::Family family, std::span<const double> y, const DesignMatrix& x,
                const ActiveSets& active, const FitConfig& config = {},
                const FittedModel* start = nullptr);

FittedModel intercept_only_fit(dists::Family family, std::span<const double> y,
                               const FitConfig& config = {});

/// Two-sided Wald p-values 2(1 - Phi(|beta / se|)), one vector per equation,
/// intercept first. A non-finite SE gives p = 1.
std::array<std::vector<double>, kParams> wald_pvalues(const FittedModel& model);

/// Converged fits of one specification run, reused as starting values by the
/// next run on an overlapping sample (rolling windows).
struct SpecifyTrace {
    std::vector<FittedModel> fits;
};

/// Backward elimination: start from every covariate in every equation and
/// drop the least significant one at a time (ties: tau, nu, sigma, mu; then
/// the higher id) until all are significant. Any unconverged refit throws
/// NonConvergence.
///
/// With `trace`, a fit whose active sets match one in `trace->fits` starts
/// from it instead of the intercept-only fit or the previous step; on return
/// `trace->fits` holds this run's converged fits.
FittedModel specify(dists::Family family, std::span<const double> y, const DesignMatrix& x,
                    const FitConfig& config = {}, SpecifyTrace* trace = nullptr);

/// theta_k = g_k^{-1}(x_k beta_k). Throws MissingCovariate when an active
/// covariate is NaN, DomainError when the result leaves the parameter space.
dists::ParamVector predict_params(const FittedModel& model, const CovariateRow& row);

/// Linear predictor of every used equation for one row.
std::array<double, kParams> linear_predictors(const FittedModel& model, const CovariateRow& row);

}  // namespace spreadcast::gamlss
