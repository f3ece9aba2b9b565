#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "spreadcast/dists/distribution.hpp"
#include "spreadcast/errors.hpp"

using namespace spreadcast;
using namespace spreadcast::dists;
using Catch::Approx;

namespace {

double mass(Family f, const ParamVector& p) {
    return oracle::real_line([&](double z) {
        return pdf(f, p, p.mu() + p.sigma() * z) * p.sigma();
    });
}

}  // namespace

TEST_CASE("normal reference values") {
    const ParamVector p(0.0, 1.0);
    CHECK(pdf(Family::Normal, p, 0.0) == Approx(0.3989423).margin(1e-7));
    CHECK(log_likelihood(Family::Normal, p, 0.0) == Approx(-0.9189385).margin(1e-7));
    CHECK(cdf(Family::Normal, p, 0.0) == 0.5);
    CHECK(std::abs(quantile(Family::Normal, p, 0.5)) < 1e-15);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ParamVector(0.0, 0.0), DomainError);
    CHECK_THROWS_AS(ParamVector(0.0, 1.0, 0.0, -1.0), DomainError);
    CHECK_THROWS_AS(ParamVector(NAN, 1.0), DomainError);
    CHECK_THROWS_AS(quantile(Family::Normal, ParamVector(0, 1), 1.0), DomainError);
    CHECK(parse_family("jsuo") == Family::JSUo);
    CHECK(parse_family("NORMAL") == Family::Normal);
    CHECK_THROWS_AS(parse_family("BCT"), DomainError);
}

TEST_CASE("nu = 0 gives a symmetric density with median mu") {
    for (Family f : kAllFamilies) {
        const ParamVector p(1.5, 2.0, 0.0, 5.0);
        CAPTURE(to_string(f));
        for (double d : {0.1, 0.7, 3.0, 25.0}) {
            CHECK(pdf(f, p, 1.5 + d) == Approx(pdf(f, p, 1.5 - d)).epsilon(1e-12));
        }
        CHECK(cdf(f, p, 1.5) == Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("SEP2 density against a high-precision evaluation") {
    const double v = pdf(Family::SEP2, ParamVector(0.0, 1.0, 0.5, 2.0), 0.7);
    CHECK(v == Approx(0.397705751436205863913852363871).epsilon(1e-13));
}

TEST_CASE("ST5 cdf against quadrature of its density") {
    const ParamVector p(1.0, 2.0, 0.8, 0.5);
    const double c = cdf(Family::ST5, p, 3.0);
    CHECK(c == Approx(0.256171727293297730457114220909).epsilon(1e-12));
    const double q = oracle::below([&](double z) { return pdf(Family::ST5, p, 1.0 + 2.0 * z) * 2.0; },
                                   1.0);
    CHECK(std::abs(c - q) < 1e-6);
}

TEST_CASE("ST5 quantile fails cleanly for degenerate shapes") {
    // a ~ 2e45, b ~ 1e4: the beta inverse would not return
    const ParamVector p(0.0, 1.0, 0.01, 1e-45);
    CHECK_THROWS_AS(quantile(Family::ST5, p, 0.99), QuantileFailure);
    CHECK_THROWS_AS(quantile(Family::ST5, p, 0.01), QuantileFailure);
}

TEST_CASE("ST5 log-density") {
    const ParamVector p(0.0, 1.0, 1.0, 1.0);
    CHECK(log_likelihood(Family::ST5, p, 2.0) ==
          Approx(-1.98934738116284643398708569355).epsilon(1e-13));
    CHECK(mass(Family::ST5, p) == Approx(1.0).margin(1e-9));
}

TEST_CASE("ST2 upper quantile against bisection on the quadrature cdf") {
    const ParamVector p(0.0, 1.0, 2.0, 8.0);
    const double q = quantile(Family::ST2, p, 0.95);
    auto f = [&](double z) { return pdf(Family::ST2, p, z); };
    const double ref = oracle::bisect([&](double x) { return oracle::below(f, x, 1e-12) - 0.95; },
                                      0.0, 10.0, 60);
    CHECK(q == Approx(2.3052406440707819634).epsilon(1e-10));
    CHECK(std::abs(q - ref) < 1e-8);
}

TEST_CASE("log-likelihood and pdf agree") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (Family f : kAllFamilies) {
        const ParamVector p(0.3, 1.7, 0.6, 1.8);
        for (int i = 0; i < 20; ++i) {
            const double y = u(rng);
            CHECK(std::exp(log_likelihood(f, p, y)) == Approx(pdf(f, p, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("densities integrate to one") {
    for (Family f : kAllFamilies) {
        for (double nu : {-2.0, 0.0, 2.0}) {
            for (double tau : {0.8, 2.0, 10.0}) {
                CAPTURE(to_string(f), nu, tau);
                CHECK(std::abs(mass(f, ParamVector(0.0, 1.0, nu, tau)) - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("cdf is monotone and quantile inverts it") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (Family f : kAllFamilies) {
        const Distribution d(f, ParamVector(2.0, 3.0, -1.0, 2.0));
        CAPTURE(to_string(f));
        for (int i = 0; i < 40; ++i) {
            double a = u(rng), b = u(rng);
            if (a > b) std::swap(a, b);
            CHECK(d.cdf(a) <= d.cdf(b));
        }
        double prev = -INFINITY;
        for (int l = 1; l <= 99; ++l) {
            const double q = d.quantile(l / 100.0);
            CHECK(q > prev);
            prev = q;
            CHECK(std::abs(d.cdf(q) - l / 100.0) < 1e-8);
        }
        for (double y : {-7.0, 0.5, 4.0, 12.0}) {
            CHECK(d.quantile(d.cdf(y)) == Approx(y).margin(1e-6));
        }
    }
}

TEST_CASE("expected values") {
    CHECK(expected_value(Family::JSU, ParamVector(3.2, 1.0, -0.4, 2.0)) == 3.2);
    CHECK(expected_value(Family::ST2, ParamVector(0.0, 1.0, 0.0, 5.0)) == 0.0);
    for (Family f : {Family::SEP1, Family::SEP2, Family::ST2, Family::ST5}) {
        CHECK(expected_value(f, ParamVector(4.0, 2.0, 0.0, 3.0)) == 4.0);
        CHECK(expected_value(f, ParamVector(0.0, 1.0, 0.7, 250.0)) ==
              expected_value(f, ParamVector(0.0, 1.0, 0.7, 100.0)));
    }

    const ParamVector sep2(1.0, 2.0, 0.5, 2.0);
    const double first = oracle::real_line(
        [&](double z) { return z * pdf(Family::SEP2, sep2, 1.0 + 2.0 * z) * 2.0; });
    CHECK(std::abs(expected_value(Family::SEP2, sep2) - (1.0 + 2.0 * first)) < 1e-2);

    for (Family f : {Family::SEP1, Family::ST2, Family::ST5, Family::JSUo}) {
        // ST5 needs both shapes above 1/2 for a finite mean
        const ParamVector p(0.0, 1.0, 0.6, f == Family::ST5 ? 0.5 : 3.0);
        const double ez = oracle::real_line([&](double z) { return z * pdf(f, p, z); });
        CAPTURE(to_string(f));
        CHECK(expected_value(f, p) == Approx(ez).epsilon(1e-6));
    }
    // guards
    CHECK(expected_value(Family::ST2, ParamVector(0.0, 1.0, 1.0, 1.02)) == 0.0);
    CHECK(expected_value(Family::ST5, ParamVector(0.0, 1.0, 1.0, 3.0)) == 0.0);
}

TEST_CASE("ST5 shape solver") {
    auto s = st5_shape_from_nu_tau(0.0, 1.0);
    CHECK(s.a == Approx(1.0).epsilon(1e-12));
    CHECK(s.b == Approx(1.0).epsilon(1e-12));
    s = st5_shape_from_nu_tau(0.0, 0.5);
    CHECK(s.a == Approx(2.0).epsilon(1e-12));
    CHECK(s.b == Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(s.no_root);

    s = st5_shape_from_nu_tau(1.5, 0.8);
    CHECK(s.b == Approx(0.2944115160544521038).epsilon(1e-10));
    CHECK(s.b == Approx(oracle::st5_b_bisect(1.5, 0.8)).epsilon(1e-10));
    CHECK(s.a + s.b == Approx(2.0 / 0.8).epsilon(1e-14));
    CHECK(std::abs(oracle::st5_nu_residual(s.b, 0.8, 1.5)) < 1e-8);
    CHECK_THROWS_AS(st5_shape_from_nu_tau(0.0, 0.0), DomainError);
}

TEST_CASE("sampling") {
    const ParamVector tight(5.0, 0.001);
    std::mt19937_64 rng(3);
    for (double x : sample_n(Family::Normal, tight, 1000, rng)) {
        CHECK(x >= 4.99);
        CHECK(x <= 5.01);
    }
    CHECK(sample(Family::ST2, ParamVector(0, 1, 2, 10), 42) ==
          sample(Family::ST2, ParamVector(0, 1, 2, 10), 42));

    const ParamVector st2(0.0, 1.0, 2.0, 10.0);
    std::mt19937_64 g(2024);
    const std::size_t n = 100000;
    auto xs = sample_n(Family::ST2, st2, n, g);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1);
    CHECK(std::abs(mean - expected_value(Family::ST2, st2)) < 3.0 * std::sqrt(var / n));

    std::sort(xs.begin(), xs.end());
    const Distribution d(Family::ST2, st2);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; i += 97) {
        const double c = d.cdf(xs[i]);
        ks = std::max({ks, std::abs(c - double(i) / n), std::abs(c - double(i + 1) / n)});
    }
    CHECK(ks < 1.63 / std::sqrt(double(n)));
}
