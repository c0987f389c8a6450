#include "infoflow/verify.hpp"

#include "infoflow/arrow_debreu.hpp"
#include "infoflow/equity.hpp"
#include "infoflow/option.hpp"
#include "infoflow/rates.hpp"
#include "infoflow/xfactor.hpp"
#include "infoflow/zfactor.hpp"

#include <algorithm>
#include <cmath>

namespace infoflow {

namespace {

struct Suite {
    std::vector<CheckResult> out;

    void add(const char* module, const char* name, double residual, double tol, std::string detail = {}) {
        out.push_back({module, name, residual, tol, std::isfinite(residual) && residual <= tol, std::move(detail)});
    }
    // runs fn and records a failure instead of propagating
    template <class F>
    void guard(const char* module, const char* name, F&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            add(module, name, INFINITY, 0.0, e.what());
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    Suite s;
    Stream rng(seed, 0, 21);
    const auto curve = DiscountCurve::flat(0.05);
    const DiscretePayoff pay({0.3, 0.7, 1.0}, {0.1, 0.3, 0.6});
    const DiscretePayoff bin = DiscretePayoff::binary(0.2, 1.0, 0.8);

    s.guard("core", "filter vs direct Bayes", [&] {
        double err = 0.0;
        for (int k = 0; k < 50; ++k) {
            const InfoSpec spec{0.2 + 2.0 * rng.uniform(), 5.0};
            const double t = 4.9 * rng.uniform();
            const double xi = spec.sigma * t * pay.mean() + 2.0 * (rng.uniform() - 0.5) * std::sqrt(t);
            const auto p = conditional_probs(pay, spec, t, xi);
            std::vector<double> w(pay.size());
            double z = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double h = pay.h[i];
                w[i] = pay.p[i] * std::exp(spec.T / (spec.T - t) * (spec.sigma * h * xi - 0.5 * spec.sigma * spec.sigma * h * h * t));
                z += w[i];
            }
            for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(p[i] - w[i] / z));
        }
        s.add("core", "filter vs direct Bayes", err, 1e-12);
    });

    s.guard("credit", "digital decomposition", [&] {
        double err = 0.0;
        for (int k = 0; k < 50; ++k) {
            const InfoSpec spec{0.1 + rng.uniform(), 3.0};
            const double t = 2.9 * rng.uniform(), xi = rng.normal();
            const auto d = digital_decomposition(bin, spec, curve, t, xi);
            err = std::max(err, std::abs(d.reconstruction - price_bond(bin, spec, curve, t, xi).price));
        }
        s.add("credit", "digital decomposition", err, 1e-12);
    });

    s.guard("credit", "reinitialized filter", [&] {
        double err = 0.0;
        const InfoSpec spec{0.6, 4.0};
        for (int k = 0; k < 50; ++k) {
            const double t = 3.0 * rng.uniform(), u = t + (3.9 - t) * rng.uniform();
            const double xt = rng.normal(), xu = xt + rng.normal();
            const auto re = reinitialize(spec, pay, t, xt);
            const auto a = re.probs(u, xu), b = conditional_probs(pay, spec, u, xu);
            for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
        }
        s.add("credit", "reinitialized filter", err, 1e-12);
    });

    s.guard("option", "binary call vs AD integral", [&] {
        OptionSpec opt{0.5, 1.0, bin, InfoSpec{0.4, 3.0}, curve};
        const double closed = price_binary_call(opt);
        const auto ad = ad_density(opt.spec, opt.payoff, curve, opt.t);
        const double via = price_info_derivative(ad, [&](double x) {
            return std::max(price_bond(bin, opt.spec, curve, opt.t, x).price - opt.K, 0.0);
        }, 1e-12);
        s.add("option", "binary call vs AD integral", rel(via, closed), 1e-8);
        s.add("option", "binary vs multi-recovery call", rel(price_multirecovery_call(opt), closed), 1e-10);
    });

    s.guard("option", "vega vs finite difference", [&] {
        OptionSpec opt{0.6, 1.5, bin, InfoSpec{0.3, 3.0}, curve};
        const auto g = greeks(opt);
        const double h = 1e-5;
        auto up = opt, dn = opt;
        up.spec.sigma += h;
        dn.spec.sigma -= h;
        const double fd = (price_binary_call(up) - price_binary_call(dn)) / (2 * h);
        s.add("option", "vega vs finite difference", rel(g.vega, fd), 1e-5);
    });

    s.guard("equity", "exponential closed form vs quadrature", [&] {
        const SingleDividendAsset asset{ContinuousDensity::exponential(2.0), InfoSpec{0.3, 2.0}, curve};
        double err = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double t = 1.9 * rng.uniform(), xi = asset.spec.sigma * t * 2.0 + rng.normal() * std::sqrt(t);
            const double closed = price_exponential_closed(asset, t, xi);
            const Posterior q(asset.prior, asset.spec, t, xi, Posterior::Method::quadrature);
            err = std::max(err, rel(closed, curve.P(t, asset.spec.T) * q.mean()));
        }
        s.add("equity", "exponential closed form vs quadrature", err, 1e-8);
    });

    s.guard("equity", "bridge-measure call vs AD call", [&] {
        const SingleDividendAsset asset{ContinuousDensity::gamma(1.5, 3), InfoSpec{0.5, 2.0}, curve};
        const double a = price_call_bridge_measure(asset, 1.5, 1.0);
        const double b = price_continuous_call_via_ad(asset.prior, asset.spec, curve, 1.5, 1.0);
        s.add("equity", "bridge-measure call vs AD call", rel(a, b), 1e-8);
    });

    s.guard("xfactor", "coupon bond vs survival sums", [&] {
        CouponBondSpec b{0.05, 1.0, {1, 2, 3}, {0.4, 0.4, 0.4}, {0.97, 0.95, 0.93}, {0.5, 0.5, 0.5}};
        const double v = price_coupon_bond(b, MarketScenario{}, curve);
        // default in period k recovers R_k (c + p), nothing after that
        double ref = 0.0, alive = 1.0;
        for (int k = 0; k < 3; ++k) {
            const double flow = b.coupon + (k == 2 ? b.principal : 0.0);
            const double prev = alive;
            alive *= b.survival[k];
            ref += curve.P(b.dates[k]) * (alive * flow + (prev - alive) * b.recovery[k] * (b.coupon + b.principal));
        }
        s.add("xfactor", "coupon bond vs survival sums", rel(v, ref), 1e-12);
    });

    s.guard("zfactor", "probability round trip", [&] {
        double err = 0.0;
        for (int n = 2; n <= 4; ++n) {
            JointDistribution j{n, std::vector<double>(std::size_t{1} << n)};
            double z = 0.0;
            for (double& v : j.q) z += (v = 0.05 + rng.uniform());
            for (double& v : j.q) v /= z;
            const auto back = joint_from_x_probs(n, x_probs_from_joint(j));
            for (std::size_t i = 0; i < j.q.size(); ++i) err = std::max(err, std::abs(back.q[i] - j.q[i]));
        }
        s.add("zfactor", "probability round trip", err, 1e-13);
    });

    s.guard("rates", "rational model", [&] {
        RationalSpec r;
        for (int i = 0; i <= 10; ++i) {
            r.dates.push_back(i);
            r.alpha.push_back(0.5 * std::exp(-0.03 * i));
            r.beta.push_back(0.5 * std::exp(-0.05 * i));
        }
        const auto m = build_rational(r);
        const auto P = bond_price_matrix(m);
        double err = 0.0;
        for (int i = 0; i <= 10; ++i)
            for (int j = i; j <= 10; ++j)
                for (int k = 0; k <= i; ++k) err = std::max(err, std::abs(P[i][j - i][k] - rational_bond_price(r, i, j, k)));
        s.add("rates", "rational bond prices", err, 1e-14);
        const auto rep = check_paths(m, r);
        s.add("rates", "money-market account", rep.bond_vs_account, 1e-14);
        s.add("rates", "Doob decomposition", std::max(rep.doob_identity, rep.doob_short_rate), 1e-14);
        s.add("rates", "FH reconstruction", fh_representation(m).reconstruction_error, 1e-12);
    });

    s.guard("rates", "inflation identities", [&] {
        const auto L = Lattice::binary_tree(4, 0.5);
        InflationSpec spec;
        spec.A = 0.8;
        spec.B = 0.4;
        spec.dates = {0, 1, 2, 3, 4};
        spec.k = L.field();
        spec.M = L.field();
        spec.lambda = L.field();
        for (int i = 0; i <= 4; ++i)
            for (std::size_t n = 0; n < L.size(i); ++n) {
                spec.k[i][n] = 1.0 + 0.1 * L.ups(i, n);
                spec.M[i][n] = 2.0 + 0.2 * (i - L.ups(i, n));
                spec.lambda[i][n] = 0.05 + 0.01 * L.ups(i, n);
            }
        const auto m = inflation_model(spec, L);
        const auto [a, b] = index_linked_value(m, 4);
        s.add("rates", "velocity identity", m.velocity_error, 1e-15);
        s.add("rates", "index-linked identity", rel(a, b), 1e-13);
    });

    return s.out;
}

} // namespace infoflow
