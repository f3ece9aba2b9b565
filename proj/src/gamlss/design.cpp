#include "spreadcast/gamlss/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spreadcast/errors.hpp"

namespace spreadcast::gamlss {

CovariateRow empty_row() {
    CovariateRow r;
    r.fill(std::numeric_limits<double>::quiet_NaN());
    r[0] = 1.0;
    return r;
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd covariates, std::vector<int> ids) : ids_(std::move(ids)) {
    if (static_cast<Eigen::Index>(ids_.size()) != covariates.cols()) {
        throw DomainError("design: " + std::to_string(ids_.size()) + " ids for " +
                          std::to_string(covariates.cols()) + " columns");
    }
    if (ids_.size() > static_cast<std::size_t>(kMaxCovariates)) {
        throw DomainError("design: at most 8 covariates");
    }
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        const int id = ids_[i];
        if (id < 1 || id > kMaxCovariates) throw DomainError("design: covariate id out of range");
        if (std::count(ids_.begin(), ids_.end(), id) != 1) throw DomainError("design: repeated id");
        if (covariates.rows() > 0 && (covariates.col(i).array() == 0.0).all()) {
            throw SingularDesign("design: column x" + std::to_string(id) + " is identically zero");
        }
    }
    x_.resize(covariates.rows(), covariates.cols() + 1);
    x_.col(0).setOnes();
    x_.rightCols(covariates.cols()) = covariates;
}

DesignMatrix DesignMatrix::intercept_only(Eigen::Index rows) {
    DesignMatrix d;
    d.x_ = Eigen::MatrixXd::Ones(rows, 1);
    return d;
}

bool DesignMatrix::has(int id) const noexcept {
    return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

Eigen::Ref<const Eigen::VectorXd> DesignMatrix::column(int id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw MissingCovariate("design has no column x" + std::to_string(id));
    return x_.col(1 + (it - ids_.begin()));
}

Eigen::MatrixXd DesignMatrix::select(const std::vector<int>& ids) const {
    Eigen::MatrixXd out(rows(), static_cast<Eigen::Index>(ids.size()) + 1);
    out.col(0).setOnes();
    for (std::size_t j = 0; j < ids.size(); ++j) out.col(j + 1) = column(ids[j]);
    return out;
}

CovariateRow DesignMatrix::row(Eigen::Index t) const {
    CovariateRow r = empty_row();
    for (std::size_t j = 0; j < ids_.size(); ++j) r[ids_[j]] = x_(t, j + 1);
    return r;
}

DesignMatrix DesignMatrix::slice(Eigen::Index first, Eigen::Index count) const {
    DesignMatrix d;
    d.x_ = x_.middleRows(first, count);
    d.ids_ = ids_;
    return d;
}

DesignMatrix DesignMatrix::without(const std::vector<int>& drop) const {
    DesignMatrix d;
    std::vector<Eigen::Index> keep{0};
    for (std::size_t j = 0; j < ids_.size(); ++j) {
        if (std::find(drop.begin(), drop.end(), ids_[j]) == drop.end()) {
            keep.push_back(static_cast<Eigen::Index>(j + 1));
            d.ids_.push_back(ids_[j]);
        }
    }
    d.x_.resize(rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) d.x_.col(j) = x_.col(keep[j]);
    return d;
}

}  // namespace spreadcast::gamlss
