#include "infoflow/equity.hpp"
#include "infoflow/arrow_debreu.hpp"

#include <algorithm>
#include <cmath>

namespace infoflow {

namespace {

// c + phi(c)/N(c), the mean of a standard normal truncated to (-c, inf) shifted by c.
double truncated_shift(double c) {
    if (c > -5.0) return c + inv_mills(c);
    // 1/(x + 2/(x + 3/(x + ...))) at x = -c avoids the cancellation
    const double x = -c;
    double f = x;
    for (int k = 400; k >= 2; --k) f = x + k / f;
    return 1.0 / f;
}

void check_asset(const SingleDividendAsset& a, double t) {
    a.prior.validate();
    a.spec.validate();
    check_before_maturity(t, a.spec.T, "single-dividend asset");
}

double binom(int m, int j) { return std::exp(std::lgamma(m + 1) - std::lgamma(j + 1) - std::lgamma(m - j + 1)); }

} // namespace

GammaAux gamma_aux(const SingleDividendAsset& asset, double t, double xi, int kmax) {
    check_asset(asset, t);
    if (!asset.prior.gamma_family()) throw Error(Errc::invalid_input, "gamma aux: prior must be exponential or gamma");
    const double T = asset.spec.T, s = asset.spec.sigma;
    GammaAux g;
    g.A = s * s * t * T / (T - t);
    g.B = s * T * xi / (T - t) - asset.prior.rate();
    if (g.A > 0.0) g.F = fk_table(-g.B / std::sqrt(g.A), kmax);
    return g;
}

double price_single_dividend(const SingleDividendAsset& asset, double t, double xi) {
    check_asset(asset, t);
    return asset.curve.P(t, asset.spec.T) * Posterior(asset.prior, asset.spec, t, xi).mean();
}

double price_exponential_closed(const SingleDividendAsset& asset, double t, double xi) {
    check_asset(asset, t);
    if (asset.prior.kind != DensityKind::exponential)
        throw Error(Errc::invalid_input, "exponential closed form: prior must be exponential");
    const GammaAux g = gamma_aux(asset, t, xi, 1);
    const double P = asset.curve.P(t, asset.spec.T);
    if (g.A == 0.0) {
        if (g.B >= 0.0) throw Error(Errc::divergence, "exponential closed form: posterior not integrable");
        return P / (-g.B);
    }
    const double sa = std::sqrt(g.A);
    return P * truncated_shift(g.B / sa) / sa;
}

GammaPrice price_gamma_closed(const SingleDividendAsset& asset, double t, double xi) {
    check_asset(asset, t);
    if (!asset.prior.gamma_family()) throw Error(Errc::invalid_input, "gamma closed form: prior must be gamma");
    const int n = asset.prior.shape();
    const GammaAux g = gamma_aux(asset, t, xi, n);
    const double P = asset.curve.P(t, asset.spec.T);
    if (g.A == 0.0) {
        if (g.B >= 0.0) throw Error(Errc::divergence, "gamma closed form: posterior not integrable");
        return {P * n / (-g.B), true};
    }
    const double c = g.B / std::sqrt(g.A);
    auto S = [&](int m, double& mag) {
        double s = 0.0;
        mag = 0.0;
        for (int j = 0; j <= m; ++j) {
            const double term = binom(m, j) * std::pow(c, m - j) * g.F[j];
            s += term;
            mag += std::abs(term);
        }
        return s;
    };
    double m1 = 0.0, m0 = 0.0;
    const double num = S(n, m1), den = S(n - 1, m0);
    // beyond this ratio of magnitude to value, too many digits cancel
    if (num > 0.0 && den > 0.0 && m1 <= 1e6 * num && m0 <= 1e6 * den)
        return {P * num / (den * std::sqrt(g.A)), true};
    return {P * Posterior(asset.prior, asset.spec, t, xi, Posterior::Method::quadrature).mean(), false};
}

double critical_xi(const SingleDividendAsset& asset, double K, double t) {
    const double T = asset.spec.T;
    const double w = std::sqrt(t * (T - t) / T);
    auto f = [&](double x) { return price_single_dividend(asset, t, x) - K; };
    double lo = -w, hi = w;
    for (int i = 0; i < 200 && f(lo) > 0.0; ++i) lo = 2.0 * lo - w;
    for (int i = 0; i < 200 && f(hi) < 0.0; ++i) hi = 2.0 * hi + w;
    if (!(f(lo) <= 0.0 && f(hi) >= 0.0)) throw Error(Errc::no_solution, "call: critical information not bracketed");
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double price_call_bridge_measure(const SingleDividendAsset& asset, double K, double t) {
    check_asset(asset, t);
    if (!(t > 0.0)) throw Error(Errc::invalid_input, "call: exercise date must be positive");
    const auto& p = asset.prior;
    const double T = asset.spec.T, sigma = asset.spec.sigma;
    const double P0T = asset.curve.P(T), P0t = asset.curve.P(t);
    const double P = P0T / P0t;
    if (K <= P * p.lo()) return P0T * p.mean() - P0t * K;
    if (K >= P * p.hi()) return 0.0;
    if (sigma == 0.0) return P0t * std::max(0.0, P * p.mean() - K);
    const double tau = t * T / (T - t);
    const double zs = critical_xi(asset, K, t) * std::sqrt(T / (t * (T - t)));
    const double st = sigma * std::sqrt(tau);
    auto w = [&](double x) { return norm_cdf(-zs + st * x); };
    auto [lo, hi] = prior_range(p);
    std::vector<double> pts{lo, hi};
    const double x0 = zs / st;
    for (double d : {0.0, 1.0, 4.0, 16.0, 64.0})
        for (double s : {-1.0, 1.0}) {
            const double x = x0 + s * d / st;
            if (x > lo && x < hi) pts.push_back(x);
        }
    if (p.kind == DensityKind::tabulated)
        for (double x : p.grid) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double I1 = integrate_pieces([&](double x) { return x * p.pdf(x) * w(x); }, pts, 1e-13);
    const double I0 = integrate_pieces([&](double x) { return p.pdf(x) * w(x); }, pts, 1e-13);
    return P0T * I1 - P0t * K * I0;
}

AssetDynamics asset_dynamics_coeffs(const SingleDividendAsset& asset, double t, double xi) {
    check_asset(asset, t);
    const double T = asset.spec.T;
    const Posterior post(asset.prior, asset.spec, t, xi);
    const double P = asset.curve.P(t, T);
    AssetDynamics d;
    d.price = P * post.mean();
    d.drift = asset.curve.short_rate(t) * d.price;
    d.vol = P * asset.spec.sigma * T / (T - t) * post.variance();
    return d;
}

BSRecovery bs_recovery_price(double S0, double r, double nu, double T, double sigma, double t, double xi) {
    if (!(T > 0.0) || !(S0 > 0.0)) throw Error(Errc::invalid_input, "bs recovery: need S0 > 0 and T > 0");
    check_before_maturity(t, T, "bs_recovery_price");
    const double k = T / (T - t); // tau / t
    const double tau = t * k;
    const double q = sigma * sigma * tau + 1.0;
    BSRecovery out;
    const double P = std::exp(-r * (T - t));
    out.price = P * S0 *
                std::exp(r * T - 0.5 * nu * nu * T + 0.5 * nu * nu * T / q + nu * std::sqrt(T) * sigma * k * xi / q);
    out.vol = nu * sigma * std::pow(T, 1.5) / (T + (sigma * sigma * T - 1.0) * t);
    return out;
}

} // namespace infoflow
