#include "infoflow/xfactor.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace infoflow;

namespace {

double posterior_one(double p1, double sigma, double T, double t, double xi) {
    return oracle::bayes({0.0, 1.0}, {1 - p1, p1}, sigma, T, t, xi)[1];
}

} // namespace

TEST_CASE("payout expressions") {
    auto resolve = [](const std::string& id) { return id == "A" ? 0 : id == "B" ? 1 : -1; };
    const auto e = Expr::parse("2*A^2 - max(A - B, 0.5) + ind(B - 1) / 4", resolve);
    CHECK(e.eval({3.0, 1.5}) == doctest::Approx(18.0 - 1.5 + 0.25));
    CHECK(e.eval({0.0, 0.5}) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(Expr::parse("A + C", resolve), Error);
    CHECK_THROWS_AS(Expr::parse("A + (B", resolve), Error);
}

TEST_CASE("graph validation") {
    CashFlowGraph g;
    g.add_factor({"A", 2.0, DiscretePayoff::binary(0.0, 1.0, 0.5), 1.0});
    CHECK_THROWS_AS(g.add_factor({"A", 1.0, DiscretePayoff::binary(0.0, 1.0, 0.5), 1.0}), Error);
    // a flow may not depend on a factor revealed after it is paid
    CHECK_THROWS_AS(g.add_flow(1.0, "A"), Error);
    CHECK_NOTHROW(g.add_flow(2.0, "A"));
    MarketScenario s;
    s.t = 2.5;
    CHECK_THROWS_AS(price_asset(g, s, DiscountCurve::flat(0.0)), Error); // revealed without a value
}

TEST_CASE("pricing methods") {
    const auto curve = DiscountCurve::flat(0.03);
    MarketScenario s;
    s.t = 0.5;
    SUBCASE("factorized product") {
        CashFlowGraph g;
        g.add_factor({"A", 1.0, DiscretePayoff::binary(0.0, 1.0, 0.8), 0.9});
        g.add_factor({"B", 2.0, ContinuousDensity::gaussian(1.0, 0.25), 0.5});
        g.add_flow(2.0, "3*A*B + B^2");
        s.xi = {{"A", 0.3}, {"B", 0.2}};
        const auto p = price_asset_detailed(g, s, curve);
        CHECK(p.method == "factorized");
        const double ea = posterior_one(0.8, 0.9, 1.0, 0.5, 0.3);
        // conjugate normal update for B
        const double A = 0.25 * 0.5 * 2.0 / 1.5, b = 0.5 * 2.0 * 0.2 / 1.5;
        const double prec = 1.0 / 0.25 + A, mb = (1.0 / 0.25 + b) / prec, vb = 1.0 / prec;
        CHECK(p.value == doctest::Approx(curve.P(0.5, 2.0) * (3 * ea * mb + vb + mb * mb)).epsilon(1e-12));
    }
    SUBCASE("enumeration of a non-polynomial payout") {
        CashFlowGraph g;
        g.add_factor({"A", 1.0, DiscretePayoff({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5}), 0.7});
        g.add_factor({"B", 1.5, DiscretePayoff::binary(0.0, 1.0, 0.6), 1.1});
        g.add_flow(1.5, "max(A - B, 0.2)");
        s.xi = {{"A", 0.1}, {"B", 0.4}};
        const auto p = price_asset_detailed(g, s, curve);
        CHECK(p.method == "enumeration");
        const auto pa = oracle::bayes({0.0, 0.5, 1.0}, {0.2, 0.3, 0.5}, 0.7, 1.0, 0.5, 0.1);
        const double pb = posterior_one(0.6, 1.1, 1.5, 0.5, 0.4);
        double ref = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) ref += pa[i] * (j ? pb : 1 - pb) * std::max(0.5 * i - j, 0.2);
        CHECK(p.value == doctest::Approx(curve.P(0.5, 1.5) * ref).epsilon(1e-13));
    }
    SUBCASE("Monte Carlo when enumeration is too large") {
        CashFlowGraph g;
        std::string sum;
        std::vector<double> q;
        for (int k = 0; k < 20; ++k) {
            const std::string id = "Y" + std::to_string(k);
            const double p1 = 0.3 + 0.03 * k;
            g.add_factor({id, 1.0, DiscretePayoff::binary(0.0, 1.0, p1), 0.5});
            s.xi[id] = 0.05 * (k % 5);
            q.push_back(posterior_one(p1, 0.5, 1.0, 0.5, 0.05 * (k % 5)));
            sum += (k ? " + " : "") + id;
        }
        g.add_flow(1.0, "max(" + sum + " - 10, 0)");
        const auto p = price_asset_detailed(g, s, curve, 5, 1u << 16);
        CHECK(p.method == "monte-carlo");
        // distribution of the count by convolution
        std::vector<double> dist{1.0};
        for (double v : q) {
            std::vector<double> nx(dist.size() + 1, 0.0);
            for (std::size_t i = 0; i < dist.size(); ++i) nx[i] += dist[i] * (1 - v), nx[i + 1] += dist[i] * v;
            dist = nx;
        }
        double ref = 0.0;
        for (std::size_t i = 11; i < dist.size(); ++i) ref += dist[i] * (i - 10.0);
        ref *= curve.P(0.5, 1.0);
        CHECK(p.std_error > 0.0);
        CHECK(std::abs(p.value - ref) < 4 * curve.P(0.5, 1.0) * p.std_error);
    }
    SUBCASE("realised factors") {
        CashFlowGraph g;
        g.add_factor({"A", 0.4, DiscretePayoff::binary(0.0, 1.0, 0.5), 1.0});
        g.add_flow(1.0, "2*A");
        s.realized = {{"A", 1.0}};
        CHECK(price_asset(g, s, curve) == doctest::Approx(2.0 * curve.P(0.5, 1.0)));
        CHECK(volatility_vector(g, s, curve).gamma[0] == 0.0);
    }
}

TEST_CASE("correlated pair") {
    CorrelatedPairSpec c{1.0, 1.0, 0.4, 0.3, 0.6, 0.1, 1.0, 2.0, 0.9, 0.85, 0.8, 1.0};
    MarketScenario s;
    s.t = 0.3;
    s.xi = {{"X1", 0.2}, {"X2", 0.25}};
    const auto curve = DiscountCurve::flat(0.02);
    const auto r = correlated_pair(c, s, curve);
    CHECK(r.warnings.empty());
    // only X1 drives the first bond, so the correlation is the X1 share of the second bond's volatility
    auto price2 = [&](double d1, double d2) {
        auto t = s;
        t.xi["X1"] += d1;
        t.xi["X2"] += d2;
        return correlated_pair(c, t, curve).price2;
    };
    const double h = 1e-5;
    const double g1 = (price2(h, 0) - price2(-h, 0)) / (2 * h), g2 = (price2(0, h) - price2(0, -h)) / (2 * h);
    CHECK(r.correlation == doctest::Approx(g1 / std::hypot(g1, g2)).epsilon(1e-6));
    c.R2c = 0.7;
    CHECK_FALSE(correlated_pair(c, s, curve).warnings.empty());
}

TEST_CASE("basket and swap guards") {
    BasketSpec b;
    b.N = 2;
    b.dates = {1.0, 2.0};
    b.survival = {{"", 0.9}};
    MarketScenario s;
    CHECK_THROWS_AS(price_basket(b, s, DiscountCurve::flat(0.0)), Error);
    CHECK_THROWS_AS(price_cds({0.01, 0.5, 2.0, 1.0, 0.9, 0.9, 1.0, 1.0}, 0.0, 0.0, 0.0, DiscountCurve::flat(0.0)), Error);
}
