#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "dists/kernels.hpp"
#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"
#include "spreadcast/gamlss/gamlss.hpp"

namespace spreadcast::gamlss {

using dists::Family;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kStepH = 1e-4;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double default_log_tau(Family f) {
    switch (f) {
        case Family::ST1:
        case Family::ST2: return std::log(10.0);
        case Family::ST5: return std::log(0.2);
        case Family::JSUo: return 0.0;
        default: return std::log(2.0);
    }
}

// One parameter equation in standardized coordinates:
// eta = beta0 + sum_j beta_j (x_j - m_j) / s_j.
struct Block {
    std::vector<int> ids;
    MatrixXd z;
    VectorXd center;
    VectorXd scale;
    VectorXd beta;

    // original-unit coefficients  <->  standardized ones
    VectorXd to_original(const VectorXd& b) const {
        VectorXd out = b;
        for (Index j = 1; j < b.size(); ++j) {
            out(j) = b(j) / scale(j);
            out(0) -= b(j) * center(j) / scale(j);
        }
        return out;
    }
    MatrixXd jacobian() const {
        const Index p = z.cols();
        MatrixXd a = MatrixXd::Zero(p, p);
        a(0, 0) = 1.0;
        for (Index j = 1; j < p; ++j) {
            a(0, j) = -center(j) / scale(j);
            a(j, j) = 1.0 / scale(j);
        }
        return a;
    }
};

class Problem {
public:
    Problem(Family family, std::span<const double> y, const DesignMatrix& x,
            const ActiveSets& active, const FitConfig& config)
        : family_(family), params_(dists::parameter_count(family)), y_(y), cfg_(config) {
        const Index n = static_cast<Index>(y.size());
        for (int k = 0; k < params_; ++k) {
            Block& b = blocks_[k];
            b.ids = active[k];
            b.z = x.select(b.ids);
            b.center = VectorXd::Zero(b.z.cols());
            b.scale = VectorXd::Ones(b.z.cols());
            for (Index j = 1; j < b.z.cols(); ++j) {
                const double m = b.z.col(j).mean();
                const double s = std::sqrt((b.z.col(j).array() - m).square().sum() / n);
                if (!(s > 0.0) || !std::isfinite(s)) {
                    throw SingularDesign("covariate x" + std::to_string(b.ids[j - 1]) +
                                         " is constant in equation " + std::to_string(k + 1));
                }
                b.center(j) = m;
                b.scale(j) = s;
                b.z.col(j) = (b.z.col(j).array() - m) / s;
            }
            Eigen::ColPivHouseholderQR<MatrixXd> qr(b.z);
            qr.setThreshold(1e-10);
            if (qr.rank() < b.z.cols()) {
                throw SingularDesign("design of equation " + std::to_string(k + 1) +
                                     " is rank deficient");
            }
            b.beta = VectorXd::Zero(b.z.cols());
        }
        eta_ = MatrixXd::Zero(n, kParams);
        rows_ = VectorXd::Zero(n);
    }

    int params() const { return params_; }
    Block& block(int k) { return blocks_[k]; }

    void cold_start() {
        const Index n = static_cast<Index>(y_.size());
        const double mean = std::accumulate(y_.begin(), y_.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : y_) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / n);
        for (int k = 0; k < params_; ++k) blocks_[k].beta.setZero();
        blocks_[0].beta(0) = mean;
        blocks_[1].beta(0) = std::log(sd);
        if (params_ == 4) blocks_[3].beta(0) = default_log_tau(family_);
    }

    // Covariates the start model has but this fit lacks are folded into the
    // intercept at their sample mean.
    void warm_start(const FittedModel& m, const DesignMatrix& x) {
        for (int k = 0; k < params_; ++k) {
            Block& b = blocks_[k];
            if (k >= m.parameters() || m.eq[k].beta.size() == 0) continue;
            const Equation& e = m.eq[k];
            b.beta.setZero();
            b.beta(0) = e.beta(0);
            for (std::size_t i = 0; i < e.active.size(); ++i) {
                const double coef = e.beta(i + 1);
                const auto it = std::find(b.ids.begin(), b.ids.end(), e.active[i]);
                if (it == b.ids.end()) {
                    if (x.has(e.active[i])) b.beta(0) += coef * x.column(e.active[i]).mean();
                    continue;
                }
                const Index j = 1 + (it - b.ids.begin());
                b.beta(j) = coef * b.scale(j);
                b.beta(0) += coef * b.center(j);
            }
        }
    }

    double refresh() {
        ++version_;
        for (int k = 0; k < params_; ++k) eta_.col(k) = blocks_[k].z * blocks_[k].beta;
        double total = 0.0;
        for (Index t = 0; t < eta_.rows(); ++t) {
            rows_(t) = row_ll(t, eta_(t, 0), eta_(t, 1), eta_(t, 2), eta_(t, 3));
            total += rows_(t);
        }
        return total;
    }

    double row_ll(Index t, double e0, double e1, double e2, double e3) const {
        const double y = y_[t];
        if (family_ == Family::Normal) {
            const double z = (y - e0) * std::exp(-e1);
            const double v = -e1 - kLogSqrt2Pi - 0.5 * z * z;
            return std::isfinite(v) ? v : kNegInf;
        }
        const double sigma = std::exp(e1);
        if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(e0) || !std::isfinite(e2) ||
            !std::isfinite(e3)) {
            return kNegInf;
        }
        const dists::detail::Kernel* kernel = nullptr;
        for (const Memo& m : memo_) {
            if (m.nu == e2 && m.log_tau == e3) {
                kernel = &m.kernel;
                break;
            }
        }
        if (kernel == nullptr) {
            const double tau = std::exp(e3);
            if (!(tau > 0.0) || !std::isfinite(tau)) return kNegInf;
            Memo& slot = memo_[memo_next_];
            memo_next_ = (memo_next_ + 1) % memo_.size();
            slot.kernel = dists::detail::make_kernel(family_, e2, tau);
            slot.nu = e2;
            slot.log_tau = e3;
            kernel = &slot.kernel;
        }
        const double z = (y - e0) / sigma;
        const double v = std::visit([z](const auto& k) { return k.log_pdf(z); }, *kernel) - e1;
        return std::isnan(v) ? kNegInf : v;
    }

    double row_ll_shift(Index t, int j, double hj, int k = -1, double hk = 0.0) const {
        double e[kParams] = {eta_(t, 0), eta_(t, 1), eta_(t, 2), eta_(t, 3)};
        e[j] += hj;
        if (k >= 0) e[k] += hk;
        return row_ll(t, e[0], e[1], e[2], e[3]);
    }

    double step_size(Index t, int k) const {
        return k == 0 ? kStepH * std::exp(eta_(t, 1)) : kStepH;
    }

    /// Score u and working weight w of every row for parameter k.
    void score(int k, VectorXd& u, VectorXd& w) const {
        const Index n = eta_.rows();
        u.resize(n);
        w.resize(n);
        if (family_ == Family::Normal) {
            for (Index t = 0; t < n; ++t) {
                const double is = std::exp(-eta_(t, 1));
                const double z = (y_[t] - eta_(t, 0)) * is;
                if (k == 0) {
                    u(t) = z * is;
                    w(t) = is * is;
                } else {
                    u(t) = z * z - 1.0;
                    w(t) = 2.0;
                }
            }
            return;
        }
        for (Index t = 0; t < n; ++t) {
            const double h = step_size(t, k);
            const double lp = row_ll_shift(t, k, h);
            const double lm = row_ll_shift(t, k, -h);
            const double l0 = rows_(t);
            double ut = (lp - lm) / (2.0 * h);
            double wt = -(lp - 2.0 * l0 + lm) / (h * h);
            if (!std::isfinite(ut)) ut = 0.0;
            if (!(wt > 0.0) || !std::isfinite(wt)) wt = std::max(ut * ut, 1e-10);
            u(t) = ut;
            w(t) = wt;
        }
    }

    /// One damped Newton step on equation k. Returns the accepted step size
    /// (max |delta beta|), 0 when no improving step was found.
    double newton_step(int k, double& ll) {
        Block& b = blocks_[k];
        VectorXd u, w;
        score(k, u, w);
        MatrixXd a = b.z.transpose() * (b.z.array().colwise() * w.array()).matrix();
        const VectorXd g = b.z.transpose() * u;
        VectorXd delta;
        double ridge = 0.0;
        for (int attempt = 0; attempt < 20; ++attempt) {
            Eigen::LDLT<MatrixXd> ldlt(a + ridge * MatrixXd::Identity(a.rows(), a.cols()));
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                (ldlt.vectorD().array() > 0.0).all()) {
                delta = ldlt.solve(g);
                if (delta.allFinite()) break;
            }
            ridge = ridge == 0.0 ? 1e-10 * std::max(1.0, a.diagonal().maxCoeff()) : ridge * 10.0;
            delta.resize(0);
        }
        if (delta.size() == 0) return 0.0;

        ++version_;
        const VectorXd old_beta = b.beta;
        const VectorXd old_eta = eta_.col(k);
        const VectorXd old_rows = rows_;
        double alpha = 1.0;
        for (int h = 0; h <= cfg_.max_halvings; ++h, alpha *= 0.5) {
            b.beta = old_beta + alpha * delta;
            eta_.col(k) = b.z * b.beta;
            double total = 0.0;
            for (Index t = 0; t < eta_.rows(); ++t) {
                rows_(t) = row_ll(t, eta_(t, 0), eta_(t, 1), eta_(t, 2), eta_(t, 3));
                total += rows_(t);
            }
            if (std::isfinite(total) && total >= ll) {
                ll = total;
                return alpha * delta.cwiseAbs().maxCoeff();
            }
        }
        b.beta = old_beta;
        eta_.col(k) = old_eta;
        rows_ = old_rows;
        return 0.0;
    }

    /// Observed information in standardized coordinates, all blocks stacked,
    /// and optionally the matching score vector.
    MatrixXd information(VectorXd* gradient = nullptr) const {
        std::array<Index, kParams + 1> off{};
        for (int k = 0; k < params_; ++k) off[k + 1] = off[k] + blocks_[k].z.cols();
        const Index n = eta_.rows();
        // per-row negative Hessian and gradient of l in eta
        Eigen::ArrayXXd neg_h(n, params_ * params_);
        Eigen::ArrayXXd grad(n, params_);
        for (Index t = 0; t < n; ++t) {
            double h[kParams] = {};
            double lp[kParams] = {}, lm[kParams] = {};
            const double l0 = rows_(t);
            double m[kParams][kParams] = {};
            double g[kParams] = {};
            if (family_ == Family::Normal) {
                const double is = std::exp(-eta_(t, 1));
                const double z = (y_[t] - eta_(t, 0)) * is;
                m[0][0] = is * is;
                m[0][1] = m[1][0] = 2.0 * z * is;
                m[1][1] = 2.0 * z * z;
                g[0] = z * is;
                g[1] = z * z - 1.0;
            } else {
                for (int k = 0; k < params_; ++k) {
                    h[k] = step_size(t, k);
                    lp[k] = row_ll_shift(t, k, h[k]);
                    lm[k] = row_ll_shift(t, k, -h[k]);
                    m[k][k] = -(lp[k] - 2.0 * l0 + lm[k]) / (h[k] * h[k]);
                    g[k] = (lp[k] - lm[k]) / (2.0 * h[k]);
                }
                for (int j = 0; j < params_; ++j) {
                    for (int k = j + 1; k < params_; ++k) {
                        const double pp = row_ll_shift(t, j, h[j], k, h[k]);
                        const double v = (pp - lp[j] - lp[k] + l0) / (h[j] * h[k]);
                        m[j][k] = m[k][j] = -v;
                    }
                }
            }
            for (int j = 0; j < params_; ++j) {
                grad(t, j) = std::isfinite(g[j]) ? g[j] : 0.0;
                for (int k = 0; k < params_; ++k) {
                    const double v = m[j][k];
                    neg_h(t, j * params_ + k) = std::isfinite(v) ? v : 0.0;
                }
            }
        }
        MatrixXd info = MatrixXd::Zero(off[params_], off[params_]);
        for (int j = 0; j < params_; ++j) {
            for (int k = j; k < params_; ++k) {
                const MatrixXd blk =
                    blocks_[j].z.transpose() *
                    (blocks_[k].z.array().colwise() * neg_h.col(j * params_ + k)).matrix();
                info.block(off[j], off[k], blk.rows(), blk.cols()) = blk;
                if (j != k) info.block(off[k], off[j], blk.cols(), blk.rows()) = blk.transpose();
            }
        }
        if (gradient != nullptr) {
            gradient->resize(off[params_]);
            for (int k = 0; k < params_; ++k) {
                gradient->segment(off[k], blocks_[k].z.cols()) = blocks_[k].z.transpose() * grad.col(k).matrix();
            }
        }
        return info;
    }

    enum class Step { Improved, Converged, Failed };

    /// One damped Newton step on all equations at once, with the
    /// information's eigenvalues floored to keep the direction ascending.
    /// Converged, without moving, when the information is positive definite
    /// and the predicted gain is at most `tol`.
    Step joint_step(double& ll, double tol) {
        VectorXd g;
        const MatrixXd info = information(&g);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(info);
        if (es.info() != Eigen::Success || !g.allFinite()) return Step::Failed;
        const VectorXd lam = es.eigenvalues();
        const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
        VectorXd inv(lam.size());
        for (Index i = 0; i < lam.size(); ++i) inv(i) = 1.0 / std::max(std::abs(lam(i)), 1e-9 * top);
        const VectorXd delta = es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().transpose() * g));
        if (!delta.allFinite()) return Step::Failed;
        const bool done = lam.minCoeff() > 0.0 && 0.5 * g.dot(delta) <= tol;

        std::array<VectorXd, kParams> old;
        for (int k = 0; k < params_; ++k) old[k] = blocks_[k].beta;
        const MatrixXd old_eta = eta_;
        const VectorXd old_rows = rows_;
        double alpha = 1.0;
        // a converged step is taken whole or not at all; the information it
        // was computed from stands for the final coefficients
        const int halvings = done ? 0 : cfg_.max_halvings;
        for (int h = 0; h <= halvings; ++h, alpha *= 0.5) {
            Index off = 0;
            for (int k = 0; k < params_; ++k) {
                const Index p = blocks_[k].z.cols();
                blocks_[k].beta = old[k] + alpha * delta.segment(off, p);
                off += p;
            }
            const double total = refresh();
            if (std::isfinite(total) && total >= ll) {
                ll = total;
                break;
            }
            if (h == halvings) {
                for (int k = 0; k < params_; ++k) blocks_[k].beta = old[k];
                eta_ = old_eta;
                rows_ = old_rows;
                ++version_;
                if (!done) return Step::Failed;
            }
        }
        if (!done) return Step::Improved;
        info_ = info;
        info_version_ = version_;
        return Step::Converged;
    }

    /// Information at the final coefficients, reusing the convergence check's.
    MatrixXd final_information() {
        if (info_version_ == version_) return info_;
        refresh();
        return information();
    }

private:
    Family family_;
    int params_;
    std::span<const double> y_;
    FitConfig cfg_;
    std::array<Block, kParams> blocks_;
    MatrixXd eta_;
    VectorXd rows_;
    // recent kernels: rows often share (nu, tau), and finite differences
    // revisit the same shifted pairs
    struct Memo {
        dists::detail::Kernel kernel;
        double nu = std::numeric_limits<double>::quiet_NaN();
        double log_tau = std::numeric_limits<double>::quiet_NaN();
    };
    mutable std::array<Memo, 8> memo_;
    mutable std::size_t memo_next_ = 0;
    // information at the current coefficients, valid while version_ matches
    MatrixXd info_;
    long info_version_ = -1;
    long version_ = 0;
};

MatrixXd stable_inverse(const MatrixXd& info) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(info);
    if (es.info() != Eigen::Success) {
        return MatrixXd::Constant(info.rows(), info.cols(), std::numeric_limits<double>::quiet_NaN());
    }
    const VectorXd lam = es.eigenvalues();
    const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    VectorXd inv(lam.size());
    for (Index i = 0; i < lam.size(); ++i) inv(i) = 1.0 / std::max(lam(i), 1e-13 * top);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

int FittedModel::coefficient_count() const noexcept {
    int n = 0;
    for (int k = 0; k < parameters(); ++k) n += static_cast<int>(eq[k].beta.size());
    return n;
}

ActiveSets FittedModel::active_sets() const {
    ActiveSets a;
    for (int k = 0; k < parameters(); ++k) a[k] = eq[k].active;
    return a;
}

ActiveSets full_active_sets(Family family, const DesignMatrix& x) {
    ActiveSets a;
    for (int k = 0; k < dists::parameter_count(family); ++k) a[k] = x.ids();
    return a;
}

FittedModel fit(Family family, std::span<const double> y, const DesignMatrix& x,
                const ActiveSets& active, const FitConfig& config, const FittedModel* start) {
    const Index n = static_cast<Index>(y.size());
    if (n != x.rows()) throw DomainError("fit: response and design differ in length");
    const int params = dists::parameter_count(family);
    int coefs = 0;
    for (int k = 0; k < params; ++k) coefs += static_cast<int>(active[k].size()) + 1;
    if (n <= coefs + 10) {
        throw DomainError("fit: " + std::to_string(n) + " rows for " + std::to_string(coefs) +
                          " coefficients");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DomainError("fit: response contains non-finite values");
    }
    {
        const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : y) ss += (v - mean) * (v - mean);
        if (ss / n < 1e-12) throw NonConvergence("response variance below 1e-12");
    }

    Problem prob(family, y, x, active, config);
    prob.cold_start();
    double ll = prob.refresh();
    int rs_cycles = config.rs_cycles;
    if (start != nullptr && start->family == family) {
        prob.warm_start(*start, x);
        const double warm = prob.refresh();
        if (std::isfinite(warm) && !(warm < ll)) {
            ll = warm;
            rs_cycles = 0;
        } else {
            prob.cold_start();
            ll = prob.refresh();
        }
    }
    if (!std::isfinite(ll)) throw NonConvergence("log-likelihood is not finite at the start values");

    FittedModel m;
    m.family = family;
    m.observations = static_cast<int>(n);
    m.loglik_trace.push_back(ll);
    for (int cycle = 1; cycle <= config.max_cycles; ++cycle) {
        const double before = ll;
        const double tol = config.loglik_tol * std::max(1.0, std::abs(before));
        Problem::Step step = Problem::Step::Failed;
        if (cycle > rs_cycles) step = prob.joint_step(ll, tol);
        if (step == Problem::Step::Failed) {
            for (int k = 0; k < params; ++k) {
                for (int s = 0; s < config.inner_steps; ++s) {
                    if (prob.newton_step(k, ll) < config.coef_tol) break;
                }
            }
        }
        m.cycles = cycle;
        m.loglik_trace.push_back(ll);
        if (step == Problem::Step::Converged || std::abs(ll - before) <= tol) {
            m.converged = true;
            break;
        }
    }

    const MatrixXd cov = stable_inverse(prob.final_information());
    Index off = 0;
    for (int k = 0; k < params; ++k) {
        Block& b = prob.block(k);
        const Index p = b.z.cols();
        const MatrixXd a = b.jacobian();
        const MatrixXd ck = a * cov.block(off, off, p, p) * a.transpose();
        Equation& e = m.eq[k];
        e.active = b.ids;
        e.beta = b.to_original(b.beta);
        e.se = ck.diagonal().cwiseMax(0.0).cwiseSqrt();
        e.link = dists::link_of(k);
        off += p;
    }
    m.loglik = ll;
    m.aic = -2.0 * ll + 2.0 * m.coefficient_count();
    return m;
}

FittedModel intercept_only_fit(Family family, std::span<const double> y, const FitConfig& config) {
    if (y.size() < 30) throw DomainError("intercept-only fit needs at least 30 observations");
    const DesignMatrix x = DesignMatrix::intercept_only(static_cast<Index>(y.size()));
    return fit(family, y, x, ActiveSets{}, config);
}

}  // namespace spreadcast::gamlss
