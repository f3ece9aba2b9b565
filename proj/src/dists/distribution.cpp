#include "spreadcast/dists/distribution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "cdf_engine.hpp"
#include "kernels.hpp"
#include "spreadcast/errors.hpp"

namespace spreadcast::dists {

std::string_view to_string(Family f) noexcept {
    switch (f) {
        case Family::Normal: return "NO";
        case Family::JSU: return "JSU";
        case Family::JSUo: return "JSUo";
        case Family::SEP1: return "SEP1";
        case Family::SEP2: return "SEP2";
        case Family::ST1: return "ST1";
        case Family::ST2: return "ST2";
        case Family::ST5: return "ST5";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "NO" || upper == "NORMAL") return Family::Normal;
    for (Family f : kAllFamilies) {
        std::string candidate(to_string(f));
        std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        if (candidate == upper) return f;
    }
    throw DomainError("unknown distribution family '" + std::string(name) + "'");
}

ParamVector::ParamVector(double mu, double sigma, double nu, double tau)
    : mu_(mu), sigma_(sigma), nu_(nu), tau_(tau) {
    if (!std::isfinite(mu) || !std::isfinite(nu)) {
        throw DomainError("mu and nu must be finite");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be finite and > 0, got " + std::to_string(sigma));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("tau must be finite and > 0, got " + std::to_string(tau));
    }
}

double ParamVector::operator[](int k) const noexcept {
    switch (k) {
        case 0: return mu_;
        case 1: return sigma_;
        case 2: return nu_;
        default: return tau_;
    }
}

double log_density(Family family, double y, double mu, double sigma, double nu,
                   double tau) noexcept {
    if (!(sigma > 0.0) || !(tau > 0.0) || !std::isfinite(sigma) || !std::isfinite(tau) ||
        !std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(y)) {
        return detail::kNegInf;
    }
    const double z = (y - mu) / sigma;
    const double lz = std::visit([z](const auto& k) { return k.log_pdf(z); },
                                 detail::make_kernel(family, nu, tau));
    if (std::isnan(lz)) return detail::kNegInf;
    return lz - std::log(sigma);
}

// ---------------------------------------------------------------------------
// Distribution

Distribution::Distribution(Family family, const ParamVector& p) : family_(family), params_(p) {}
Distribution::~Distribution() = default;
Distribution::Distribution(const Distribution& other)
    : family_(other.family_), params_(other.params_) {}
Distribution& Distribution::operator=(const Distribution& other) {
    if (this != &other) {
        family_ = other.family_;
        params_ = other.params_;
        engine_.reset();
    }
    return *this;
}
Distribution::Distribution(Distribution&&) noexcept = default;
Distribution& Distribution::operator=(Distribution&&) noexcept = default;

double Distribution::log_pdf(double y) const {
    if (!std::isfinite(y)) throw DomainError("density argument must be finite");
    const double z = (y - params_.mu()) / params_.sigma();
    const double lz = std::visit([z](const auto& k) { return k.log_pdf(z); },
                                 detail::make_kernel(family_, params_.nu(), params_.tau()));
    if (std::isnan(lz)) throw EvalError("log-density evaluated to NaN");
    return lz - std::log(params_.sigma());
}

double Distribution::pdf(double y) const { return std::exp(log_pdf(y)); }

detail::CdfEngine& Distribution::engine() const {
    if (!engine_) {
        auto kernel = detail::make_kernel(family_, params_.nu(), params_.tau());
        engine_ = std::make_unique<detail::CdfEngine>([kernel](double z) {
            const double lz = std::visit([z](const auto& k) { return k.log_pdf(z); }, kernel);
            return std::isnan(lz) ? 0.0 : std::exp(lz);
        });
    }
    return *engine_;
}

double Distribution::standardized_cdf(double z) const {
    const auto kernel = detail::make_kernel(family_, params_.nu(), params_.tau());
    const auto closed = std::visit([z](const auto& k) { return k.cdf(z); }, kernel);
    if (closed) return *closed;
    return engine().cdf(z);
}

double Distribution::cdf(double y) const {
    if (std::isnan(y)) throw DomainError("cdf argument is NaN");
    return standardized_cdf((y - params_.mu()) / params_.sigma());
}

double Distribution::standardized_quantile(double level) const {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("quantile level must lie in (0,1), got " + std::to_string(level));
    }
    if (detail::has_closed_form_cdf(family_)) {
        const auto kernel = detail::make_kernel(family_, params_.nu(), params_.tau());
        std::optional<double> z;
        try {
            z = std::visit([level](const auto& k) { return k.quantile(level); }, kernel);
        } catch (const std::exception& e) {
            // root finders inside the incomplete-beta inverse can still throw
            throw QuantileFailure(std::string("closed-form quantile failed: ") + e.what());
        }
        if (!z || !std::isfinite(*z)) {
            throw QuantileFailure("closed-form quantile is not finite at level " +
                                  std::to_string(level));
        }
        return *z;
    }
    try {
        return engine().quantile(level);
    } catch (const EvalError& e) {
        throw QuantileFailure(std::string("quantile search failed: ") + e.what());
    }
}

double Distribution::quantile(double level) const {
    return params_.mu() + params_.sigma() * standardized_quantile(level);
}

std::vector<double> Distribution::quantiles(std::span<const double> levels) const {
    std::vector<double> out;
    out.reserve(levels.size());
    for (double l : levels) out.push_back(quantile(l));
    return out;
}

double Distribution::expected_value() const { return dists::expected_value(family_, params_); }

// ---------------------------------------------------------------------------
// Free functions

double pdf(Family family, const ParamVector& p, double y) { return Distribution(family, p).pdf(y); }

double log_likelihood(Family family, const ParamVector& p, double y) {
    return Distribution(family, p).log_pdf(y);
}

double cdf(Family family, const ParamVector& p, double y) { return Distribution(family, p).cdf(y); }

double quantile(Family family, const ParamVector& p, double level) {
    return Distribution(family, p).quantile(level);
}

double open_uniform(std::mt19937_64& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double sample(Family family, const ParamVector& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return Distribution(family, p).quantile(open_uniform(rng));
}

std::vector<double> sample_n(Family family, const ParamVector& p, std::size_t n,
                             std::mt19937_64& rng) {
    std::vector<double> u(n);
    for (auto& v : u) v = open_uniform(rng);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    const Distribution dist(family, p);
    std::vector<double> out(n);
    for (std::size_t i : order) out[i] = dist.quantile(u[i]);
    return out;
}

}  // namespace spreadcast::dists
