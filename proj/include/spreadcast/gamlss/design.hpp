#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace spreadcast::gamlss {

inline constexpr int kMaxCovariates = 8;
inline constexpr int kParams = 4;

/// Covariate values of one observation indexed by column id: slot j holds
/// x_j for j = 1..8, slot 0 is unused. NaN marks an unavailable covariate.
using CovariateRow = std::array<double, kMaxCovariates + 1>;

CovariateRow empty_row();

/// T rows of an intercept column followed by covariates with stable ids
/// (1..8 for x1..x8).
class DesignMatrix {
public:
    /// `covariates` is T x m, `ids` names its columns. Throws SingularDesign
    /// for an all-zero column and DomainError for bad or repeated ids.
    DesignMatrix(Eigen::MatrixXd covariates, std::vector<int> ids);

    static DesignMatrix intercept_only(Eigen::Index rows);

    Eigen::Index rows() const noexcept { return x_.rows(); }
    const std::vector<int>& ids() const noexcept { return ids_; }
    bool has(int id) const noexcept;

    /// Full matrix with the intercept in column 0.
    const Eigen::MatrixXd& matrix() const noexcept { return x_; }

    /// Column of covariate `id` (excluding the intercept).
    Eigen::Ref<const Eigen::VectorXd> column(int id) const;

    /// Intercept plus the listed covariates, in the listed order.
    Eigen::MatrixXd select(const std::vector<int>& ids) const;

    CovariateRow row(Eigen::Index t) const;

    /// Rows [first, first + count) as a new design.
    DesignMatrix slice(Eigen::Index first, Eigen::Index count) const;

    /// Same rows with the listed covariates removed.
    DesignMatrix without(const std::vector<int>& drop) const;

private:
    DesignMatrix() = default;
    Eigen::MatrixXd x_;
    std::vector<int> ids_;
};

}  // namespace spreadcast::gamlss
