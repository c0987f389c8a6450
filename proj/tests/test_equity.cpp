#include "infoflow/arrow_debreu.hpp"
#include "infoflow/equity.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace infoflow;

namespace {

// E[X | xi_t] for X ~ Gamma(shape n, rate l), by quadrature of the posterior.
double gamma_posterior_mean(double l, int n, const InfoSpec& s, double t, double xi) {
    const double A = s.sigma * s.sigma * t * s.T / (s.T - t), b = s.sigma * s.T * xi / (s.T - t);
    const double Bc = b - l, peak = (Bc + std::sqrt(Bc * Bc + 4 * A * (n - 1))) / (2 * A);
    return oracle::posterior_moment([&](double x) { return std::exp((n - 1) * std::log(x) - l * x); }, A, b, 1, peak,
                                    1.0 / std::sqrt(A));
}

} // namespace

TEST_CASE("single-dividend asset prices") {
    const auto curve = DiscountCurve::flat(0.02);
    const InfoSpec spec{0.5, 2.0};
    SUBCASE("t = 0 prices the prior mean") {
        const SingleDividendAsset a{ContinuousDensity::gamma(2.0, 3), spec, curve};
        CHECK(price_single_dividend(a, 0.0, 0.0) == doctest::Approx(curve.P(2.0) * 1.5).epsilon(1e-12));
    }
    SUBCASE("exponential and gamma closed forms") {
        for (double t : {0.3, 1.5})
            for (double xi : {-0.4, 0.2, 1.0}) {
                const SingleDividendAsset e{ContinuousDensity::exponential(0.8), spec, curve};
                CHECK(price_exponential_closed(e, t, xi) ==
                      doctest::Approx(curve.P(t, 2.0) * gamma_posterior_mean(1.25, 1, spec, t, xi)).epsilon(1e-9));
                const SingleDividendAsset g{ContinuousDensity::gamma(1.7, 4), spec, curve};
                CHECK(price_gamma_closed(g, t, xi).value ==
                      doctest::Approx(curve.P(t, 2.0) * gamma_posterior_mean(1.7, 4, spec, t, xi)).epsilon(1e-9));
            }
    }
    SUBCASE("closed form refuses a non-integrable posterior") {
        const SingleDividendAsset e{ContinuousDensity::exponential(1.0), spec, curve};
        CHECK_THROWS_AS(price_exponential_closed(e, 0.0, 5.0), Error);
    }
}

TEST_CASE("gamma auxiliaries") {
    const SingleDividendAsset a{ContinuousDensity::gamma(1.2, 2), {0.9, 3.0}, DiscountCurve::flat(0.0)};
    const auto g = gamma_aux(a, 1.0, 0.6, 3);
    CHECK(g.A == doctest::Approx(0.81 * 1.0 * 3.0 / 2.0));
    CHECK(g.B == doctest::Approx(0.9 * 3.0 * 0.6 / 2.0 - 1.2));
    const auto F = fk_table(-g.B / std::sqrt(g.A), 3);
    for (int k = 0; k <= 3; ++k) CHECK(g.F[k] == doctest::Approx(F[k]).epsilon(1e-15));
}

TEST_CASE("critical information value and call") {
    const SingleDividendAsset a{ContinuousDensity::exponential(1.0), {0.7, 3.0}, DiscountCurve::flat(0.03)};
    const double t = 1.0, K = 1.1;
    const double xs = critical_xi(a, K, t);
    CHECK(price_single_dividend(a, t, xs) == doctest::Approx(K).epsilon(1e-10));
    CHECK(price_call_bridge_measure(a, K, t) ==
          doctest::Approx(price_continuous_call_via_ad(a.prior, a.spec, a.curve, K, t)).epsilon(1e-8));
}

TEST_CASE("asset dynamics") {
    const SingleDividendAsset a{ContinuousDensity::gamma(2.0, 2), {0.8, 2.5}, DiscountCurve::flat(0.04)};
    const double t = 0.9, xi = 0.5, h = 1e-5;
    const auto d = asset_dynamics_coeffs(a, t, xi);
    const double fd = (price_single_dividend(a, t, xi + h) - price_single_dividend(a, t, xi - h)) / (2 * h);
    CHECK(d.vol == doctest::Approx(fd).epsilon(1e-6));
    CHECK(d.drift == doctest::Approx(0.04 * d.price).epsilon(1e-12));
}

TEST_CASE("log-normal recovery") {
    const double T = 4.0, sigma = 0.5; // sigma^2 T = 1
    for (double t : {0.0, 1.0, 3.5}) {
        const auto b = bs_recovery_price(2.0, 0.03, 0.3, T, sigma, t, 0.4);
        CHECK(b.price == doctest::Approx(2.0 * std::exp(0.03 * t + 0.3 * 0.4 - 0.045 * t)).epsilon(1e-13));
        CHECK(b.vol == doctest::Approx(0.3).epsilon(1e-14));
    }
}
