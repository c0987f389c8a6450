#include "infoflow/credit.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace infoflow;

TEST_CASE("discount curves") {
    const auto flat = DiscountCurve::flat(0.04);
    CHECK(flat.P(2.5) == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
    CHECK(flat.P(1.0, 3.0) == doctest::Approx(std::exp(-0.08)).epsilon(1e-15));
    CHECK(flat.short_rate(1.7) == doctest::Approx(0.04));
    const auto tab = DiscountCurve::tabulated({1.0, 2.0}, {0.97, 0.93});
    // log-linear between nodes, flat forward beyond
    CHECK(tab.P(1.5) == doctest::Approx(std::sqrt(0.97 * 0.93)).epsilon(1e-14));
    CHECK(tab.P(3.0) == doctest::Approx(0.93 * 0.93 / 0.97).epsilon(1e-13));
    CHECK(tab.short_rate(1.5) == doctest::Approx(std::log(0.97 / 0.93)).epsilon(1e-10));
}

TEST_CASE("bond price and volatility") {
    const DiscretePayoff pay({0.0, 0.4, 1.0}, {0.1, 0.3, 0.6});
    const InfoSpec spec{0.8, 3.0};
    const auto curve = DiscountCurve::flat(0.03);
    const auto b0 = price_bond(pay, spec, curve, 0.0, 0.0);
    CHECK(b0.price == doctest::Approx(curve.P(3.0) * pay.mean()).epsilon(1e-15));
    for (double t : {0.5, 2.0})
        for (double xi : {-0.5, 0.6, 1.5}) {
            const auto b = price_bond(pay, spec, curve, t, xi);
            const double P = curve.P(t, 3.0);
            CHECK(b.price == doctest::Approx(P * oracle::mean_given(pay.h, pay.p, spec.sigma, 3.0, t, xi)).epsilon(1e-13));
            // the volatility is the sensitivity to the information process
            const double h = 1e-5;
            const double fd = (price_bond(pay, spec, curve, t, xi + h).price - price_bond(pay, spec, curve, t, xi - h).price) / (2 * h);
            CHECK(b.vol == doctest::Approx(fd).epsilon(1e-7));
            CHECK(b.variance >= 0.0);
        }
}

TEST_CASE("implied a-priori probabilities") {
    const auto curve = DiscountCurve::flat(0.05);
    const double B0 = curve.P(4.0) * (0.3 * 0.25 + 1.0 * 0.75);
    const auto [p0, p1] = implied_a_priori_probs(B0, curve, 4.0, 0.3, 1.0);
    CHECK(p1 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p0 + p1 == doctest::Approx(1.0));
    CHECK_THROWS_AS(implied_a_priori_probs(2.0, curve, 4.0, 0.3, 1.0), Error);
}

TEST_CASE("information timescale") {
    CHECK(information_timescale({0.5, 1.0}, DiscretePayoff::binary(0.2, 1.0, 0.5)) ==
          doctest::Approx(1.0 / (0.25 * 0.64)));
    CHECK(std::isinf(information_timescale({0.0, 1.0}, DiscretePayoff::binary(0.2, 1.0, 0.5))));
}

TEST_CASE("reinitialised model starts from the posterior") {
    const DiscretePayoff pay({0.0, 0.5, 1.0}, {0.3, 0.3, 0.4});
    const InfoSpec spec{1.2, 4.0};
    const auto r = reinitialize(spec, pay, 1.0, 0.9);
    CHECK(r.eta(1.0, 0.9) == 0.0);
    CHECK(r.spec.sigma == doctest::Approx(1.2 * 4.0 / 3.0));
    CHECK(r.spec.T == doctest::Approx(3.0));
    const auto post = conditional_probs(pay, spec, 1.0, 0.9);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.payoff.p[i] == doctest::Approx(post[i]).epsilon(1e-15));
}

TEST_CASE("bond path simulation") {
    const auto pay = DiscretePayoff::binary(0.0, 1.0, 0.8);
    const auto curve = DiscountCurve::flat(0.05);
    const auto g = TimeGrid::uniform(2.0, 40);
    SUBCASE("forced payoff") {
        const auto bp = simulate_bond_paths(pay, {1.0, 2.0}, curve, g, 20, 3, 0.0);
        for (std::size_t p = 0; p < 20; ++p) {
            CHECK(bp.terminal[p] == 0.0);
            CHECK(bp.price[p].back() == 0.0);
            CHECK(bp.price[p].front() == doctest::Approx(curve.P(2.0) * 0.8));
        }
    }
    SUBCASE("thread count does not change the draws") {
        setenv("INFOFLOW_THREADS", "1", 1);
        const auto a = simulate_bond_paths(pay, {1.0, 2.0}, curve, g, 64, 9);
        setenv("INFOFLOW_THREADS", "4", 1);
        const auto b = simulate_bond_paths(pay, {1.0, 2.0}, curve, g, 64, 9);
        unsetenv("INFOFLOW_THREADS");
        CHECK(a.price == b.price);
        CHECK(a.terminal == b.terminal);
    }
}
