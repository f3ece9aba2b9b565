#include <cmath>
#include <numbers>

#include "spreadcast/errors.hpp"
#include "spreadcast/gamlss/gamlss.hpp"

namespace spreadcast::gamlss {

std::array<std::vector<double>, kParams> wald_pvalues(const FittedModel& model) {
    std::array<std::vector<double>, kParams> out;
    for (int k = 0; k < model.parameters(); ++k) {
        const Equation& e = model.eq[k];
        out[k].resize(e.beta.size());
        for (Eigen::Index j = 0; j < e.beta.size(); ++j) {
            const double se = e.se(j);
            if (!std::isfinite(se) || !std::isfinite(e.beta(j))) {
                out[k][j] = 1.0;
            } else if (se == 0.0) {
                out[k][j] = e.beta(j) == 0.0 ? 1.0 : 0.0;
            } else {
                out[k][j] = std::erfc(std::abs(e.beta(j) / se) / std::numbers::sqrt2);
            }
        }
    }
    return out;
}

namespace {

const FittedModel* find_fit(const SpecifyTrace* trace, dists::Family family, const ActiveSets& active) {
    if (trace == nullptr) return nullptr;
    for (const FittedModel& m : trace->fits) {
        if (m.family == family && m.converged && m.active_sets() == active) return &m;
    }
    return nullptr;
}

}  // namespace

FittedModel specify(dists::Family family, std::span<const double> y, const DesignMatrix& x,
                    const FitConfig& config, SpecifyTrace* trace) {
    ActiveSets active = full_active_sets(family, x);
    std::vector<FittedModel> done;
    FittedModel model;
    if (const FittedModel* hint = find_fit(trace, family, active)) {
        model = fit(family, y, x, active, config, hint);
    } else {
        const FittedModel base = fit(family, y, x, ActiveSets{}, config);
        model = fit(family, y, x, active, config, base.converged ? &base : nullptr);
    }
    auto keep = [&] {
        if (trace != nullptr) done.push_back(model);
    };
    auto finish = [&] {
        if (trace != nullptr) trace->fits = std::move(done);
    };
    if (!model.converged) {
        finish();
        throw NonConvergence("full model did not converge");
    }
    keep();
    std::vector<EliminationStep> steps;
    for (;;) {
        const auto p = wald_pvalues(model);
        EliminationStep worst{-1, 0, -1.0};
        // tau first, then the higher id: strict '>' keeps the earlier candidate on ties
        for (int k = model.parameters() - 1; k >= 0; --k) {
            const auto& ids = model.eq[k].active;
            for (int j = static_cast<int>(ids.size()); j-- > 0;) {
                const double pv = std::isnan(p[k][j + 1]) ? 1.0 : p[k][j + 1];
                if (pv > worst.p_value) worst = {k, ids[j], pv};
            }
        }
        if (worst.parameter < 0 || worst.p_value <= config.significance) break;
        std::erase(active[worst.parameter], worst.covariate);
        steps.push_back(worst);
        const FittedModel* hint = find_fit(trace, family, active);
        FittedModel next = fit(family, y, x, active, config, hint != nullptr ? hint : &model);
        if (!next.converged) {
            finish();
            throw NonConvergence("refit after dropping x" + std::to_string(worst.covariate) +
                                 " did not converge");
        }
        model = std::move(next);
        keep();
    }
    finish();
    model.elimination = std::move(steps);
    return model;
}

}  // namespace spreadcast::gamlss
