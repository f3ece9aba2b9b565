#include <cmath>
#include <string>

#include "spreadcast/errors.hpp"
#include "spreadcast/gamlss/gamlss.hpp"

namespace spreadcast::gamlss {

std::array<double, kParams> linear_predictors(const FittedModel& model, const CovariateRow& row) {
    std::array<double, kParams> eta{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < model.parameters(); ++k) {
        const Equation& e = model.eq[k];
        double v = e.beta(0);
        for (std::size_t j = 0; j < e.active.size(); ++j) {
            const double xj = row[e.active[j]];
            if (std::isnan(xj)) {
                throw MissingCovariate("covariate x" + std::to_string(e.active[j]) + " is missing");
            }
            v += e.beta(j + 1) * xj;
        }
        eta[k] = v;
    }
    return eta;
}

dists::ParamVector predict_params(const FittedModel& model, const CovariateRow& row) {
    const auto eta = linear_predictors(model, row);
    if (model.parameters() == 2) return dists::ParamVector(eta[0], std::exp(eta[1]));
    return dists::ParamVector(eta[0], std::exp(eta[1]), eta[2], std::exp(eta[3]));
}

}  // namespace spreadcast::gamlss
