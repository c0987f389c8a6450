#include "infoflow/arrow_debreu.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace infoflow;

TEST_CASE("discrete density is a normal mixture") {
    const DiscretePayoff pay({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5});
    const InfoSpec spec{0.9, 2.0};
    const auto curve = DiscountCurve::flat(0.06);
    const double t = 0.8, sd = std::sqrt(t * (2.0 - t) / 2.0);
    const auto ad = ad_density(spec, pay, curve, t);
    for (double x : {-1.0, 0.0, 0.3, 0.9, 2.0}) {
        double ref = 0.0;
        for (std::size_t i = 0; i < 3; ++i) ref += pay.p[i] * oracle::phi((x - 0.9 * pay.h[i] * t) / sd) / sd;
        CHECK(ad(x) == doctest::Approx(curve.P(t) * ref).epsilon(1e-14));
    }
}

TEST_CASE("gaussian prior gives a normal information density") {
    const auto prior = ContinuousDensity::gaussian(0.5, 0.4);
    const InfoSpec spec{0.7, 3.0};
    const double t = 1.2;
    const auto ad = ad_density(spec, prior, DiscountCurve::flat(0.0), t);
    const double m = 0.7 * t * 0.5, v = 0.49 * t * t * 0.4 + t * (3.0 - t) / 3.0;
    for (double x : {-1.0, 0.2, 0.42, 1.5})
        CHECK(ad(x) == doctest::Approx(oracle::phi((x - m) / std::sqrt(v)) / std::sqrt(v)).epsilon(1e-10));
}

TEST_CASE("pricing against the density") {
    const auto curve = DiscountCurve::flat(0.05);
    const InfoSpec spec{0.6, 4.0};
    const double t = 1.0;
    SUBCASE("unit claim is the discount factor") {
        for (const Factor& f : {Factor(DiscretePayoff::binary(0.0, 1.0, 0.7)), Factor(ContinuousDensity::gamma(1.5, 2))}) {
            const auto ad = ad_density(spec, f, curve, t);
            CHECK(price_info_derivative(ad, [](double) { return 1.0; }, 1e-12) == doctest::Approx(curve.P(t)).epsilon(1e-10));
        }
    }
    SUBCASE("bond price is a discounted martingale") {
        const DiscretePayoff pay({0.2, 0.6, 1.0}, {0.3, 0.3, 0.4});
        const auto ad = ad_density(spec, pay, curve, t);
        const double v = price_info_derivative(ad, [&](double x) { return price_bond(pay, spec, curve, t, x).price; }, 1e-12);
        CHECK(v == doctest::Approx(curve.P(4.0) * pay.mean()).epsilon(1e-10));
    }
}

TEST_CASE("prior ranges") {
    auto [lo, hi] = prior_range(ContinuousDensity::exponential(2.0));
    CHECK(lo == 0.0);
    CHECK(std::exp(-hi / 2.0) < 1e-40);
    std::tie(lo, hi) = prior_range(ContinuousDensity::gaussian(1.0, 4.0));
    CHECK(lo == doctest::Approx(1.0 - 28.0));
    CHECK(hi == doctest::Approx(1.0 + 28.0));
}

TEST_CASE("bivariate density") {
    const DiscretePayoff pay = DiscretePayoff::binary(0.0, 1.0, 0.6);
    const InfoSpec spec{1.0, 3.0};
    const double t1 = 0.5, t2 = 2.0;
    const auto b = bivariate_ad_density(spec, pay, t1, t2);
    CHECK(b.conditional_mean(1.0) == doctest::Approx(0.25));
    CHECK(b.conditional_variance() == doctest::Approx(0.5 * 1.5 / 2.0));
    // joint of (xi_1, xi_2) given H: bridge covariance t1 (T - t2) / T
    const double v1 = t1 * (3.0 - t1) / 3.0, v2 = t2 * (3.0 - t2) / 3.0, c = t1 * (3.0 - t2) / 3.0;
    const double det = v1 * v2 - c * c;
    for (auto [x1, x2] : {std::pair{0.1, 0.3}, {0.6, 2.1}, {-0.2, 1.0}}) {
        double ref = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double a = x1 - pay.h[i] * t1, d = x2 - pay.h[i] * t2;
            const double q = (v2 * a * a - 2 * c * a * d + v1 * d * d) / det;
            ref += pay.p[i] * std::exp(-0.5 * q) / (2 * M_PI * std::sqrt(det));
        }
        CHECK(b(x1, x2) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("density guards") {
    const InfoSpec spec{1.0, 2.0};
    const auto curve = DiscountCurve::flat(0.0);
    CHECK_THROWS_AS(ad_density(spec, DiscretePayoff::binary(0.0, 1.0, 0.5), curve, 0.0), Error);
    CHECK_THROWS_AS(ad_density(spec, DiscretePayoff::binary(0.0, 1.0, 0.5), curve, 2.0), Error);
}
