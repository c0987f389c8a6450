#include "infoflow/arrow_debreu.hpp"

#include <algorithm>
#include <cmath>

namespace infoflow {

std::pair<double, double> prior_range(const ContinuousDensity& d) {
    switch (d.kind) {
    case DensityKind::gaussian: {
        const double s = std::sqrt(d.var);
        return {d.mu - 14.0 * s, d.mu + 14.0 * s};
    }
    case DensityKind::exponential:
    case DensityKind::gamma: {
        // Chernoff-style bound: the tail beyond this point is below e^-92
        const double n = d.shape();
        return {0.0, (n + 92.0 + 2.0 * std::sqrt(92.0 * n)) / d.rate()};
    }
    case DensityKind::tabulated: return {d.grid.front(), d.grid.back()};
    }
    return {0.0, 0.0};
}

namespace {

// Breakpoints around c at widths w, 4w, 16w, ... clipped to [lo, hi].
std::vector<double> breakpoints(double lo, double hi, double c, double w, const std::vector<double>& extra = {}) {
    std::vector<double> pts{lo, hi};
    if (c > lo && c < hi) pts.push_back(c);
    if (w > 0.0 && std::isfinite(w))
        for (double d = w; d < hi - lo; d *= 4.0) {
            if (c + d > lo && c + d < hi) pts.push_back(c + d);
            if (c - d > lo && c - d < hi) pts.push_back(c - d);
        }
    for (double x : extra)
        if (x > lo && x < hi) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<double> prior_nodes(const ContinuousDensity& d) {
    return d.kind == DensityKind::tabulated ? d.grid : std::vector<double>{};
}

} // namespace

ADensity::ADensity(const InfoSpec& spec, Factor factor, const DiscountCurve& curve, double t)
    : spec_(spec), factor_(std::move(factor)), t_(t) {
    spec_.validate();
    check_before_maturity(t, spec_.T, "ad_density");
    if (!(t > 0.0)) throw Error(Errc::invalid_input, "ad_density: t must be positive");
    P0t_ = curve.P(t);
    var_ = t * (spec_.T - t) / spec_.T;
    const double sd = std::sqrt(var_);
    const double st = spec_.sigma * t;
    if (auto d = std::get_if<DiscretePayoff>(&factor_)) {
        d->validate();
        lo_ = std::min(st * d->h.front(), st * d->h.back()) - 12.0 * sd;
        hi_ = std::max(st * d->h.front(), st * d->h.back()) + 12.0 * sd;
    } else {
        const auto& c = std::get<ContinuousDensity>(factor_);
        c.validate();
        std::tie(zlo_, zhi_) = prior_range(c);
        lo_ = st * zlo_ - 12.0 * sd;
        hi_ = st * zhi_ + 12.0 * sd;
    }
}

double ADensity::undiscounted(double x) const {
    const double sd = std::sqrt(var_);
    const double st = spec_.sigma * t_;
    if (auto d = std::get_if<DiscretePayoff>(&factor_)) {
        double a = 0.0;
        for (std::size_t j = 0; j < d->size(); ++j) a += d->p[j] * norm_pdf((x - st * d->h[j]) / sd) / sd;
        return a;
    }
    const auto& c = std::get<ContinuousDensity>(factor_);
    if (st == 0.0) return norm_pdf(x / sd) / sd;
    auto f = [&](double z) { return c.pdf(z) * norm_pdf((x - st * z) / sd) / sd; };
    return integrate_pieces(f, breakpoints(zlo_, zhi_, x / st, sd / st, prior_nodes(c)), 1e-12);
}

double ADensity::integrate(const std::function<double(double)>& g, double rel_tol) const {
    const double sd = std::sqrt(var_);
    const double st = spec_.sigma * t_;
    // E[g(m + sd Y)] for standard normal Y, truncated at 12 standard deviations
    auto smooth = [&](double m) {
        auto f = [&](double y) { return g(m + sd * y) * norm_pdf(y); };
        return integrate_pieces(f, {-12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0}, rel_tol);
    };
    if (auto d = std::get_if<DiscretePayoff>(&factor_)) {
        double v = 0.0;
        for (std::size_t j = 0; j < d->size(); ++j)
            if (d->p[j] > 0.0) v += d->p[j] * smooth(st * d->h[j]);
        return P0t_ * v;
    }
    const auto& c = std::get<ContinuousDensity>(factor_);
    auto outer = [&](double z) {
        const double p = c.pdf(z);
        return p > 0.0 ? p * smooth(st * z) : 0.0;
    };
    const double m = c.kind == DensityKind::tabulated ? c.mean() : std::clamp(c.mean(), zlo_, zhi_);
    const double w = std::sqrt(c.variance());
    return P0t_ * integrate_pieces(outer, breakpoints(zlo_, zhi_, m, w, prior_nodes(c)), rel_tol);
}

ADensity ad_density(const InfoSpec& spec, const Factor& factor, const DiscountCurve& curve, double t) {
    return ADensity(spec, factor, curve, t);
}

double price_info_derivative(const ADensity& ad, const std::function<double(double)>& g, double rel_tol) {
    return ad.integrate(g, rel_tol);
}

double price_continuous_call_via_ad(const ContinuousDensity& prior, const InfoSpec& spec, const DiscountCurve& curve,
                                    double K, double t) {
    prior.validate();
    spec.validate();
    check_before_maturity(t, spec.T, "continuous call");
    if (!(t > 0.0)) throw Error(Errc::invalid_input, "continuous call: exercise date must be positive");
    const double T = spec.T;
    const double P = curve.P(t, T), P0t = curve.P(t);
    const double S0 = curve.P(T) * prior.mean();
    if (K <= P * prior.lo()) return S0 - P0t * K;
    if (K >= P * prior.hi()) return 0.0;
    if (spec.sigma == 0.0) return P0t * std::max(0.0, P * prior.mean() - K);

    const double v = t * (T - t) / T, sd = std::sqrt(v);
    const double st = spec.sigma * t;
    auto S = [&](double x) { return P * Posterior(prior, spec, t, x).mean(); };
    double lo = st * prior.mean() - sd, hi = st * prior.mean() + sd;
    double step = std::max(sd, st * std::sqrt(prior.variance()));
    for (int i = 0; i < 200 && S(lo) > K; ++i) lo -= step, step *= 2.0;
    step = std::max(sd, st * std::sqrt(prior.variance()));
    for (int i = 0; i < 200 && S(hi) < K; ++i) hi += step, step *= 2.0;
    if (!(S(lo) <= K && S(hi) >= K)) throw Error(Errc::no_solution, "continuous call: critical value not bracketed");
    for (int i = 0; i < 300 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (S(mid) < K ? lo : hi) = mid;
    }
    const double xs = 0.5 * (lo + hi);

    auto [zlo, zhi] = prior_range(prior);
    auto nu = [&](double z) { return (xs - st * z) / sd; };
    const auto pts = breakpoints(zlo, zhi, xs / st, sd / st, prior_nodes(prior));
    const double I1 = integrate_pieces([&](double z) { return prior.pdf(z) * z * norm_cdf(-nu(z)); }, pts, 1e-13);
    const double I0 = integrate_pieces([&](double z) { return prior.pdf(z) * norm_cdf(-nu(z)); }, pts, 1e-13);
    return P0t * (P * I1 - K * I0);
}

BivariateAD::BivariateAD(const InfoSpec& spec, DiscretePayoff payoff, double t1, double t2)
    : spec_(spec), payoff_(std::move(payoff)), t1_(t1), t2_(t2) {
    spec_.validate();
    payoff_.validate();
    if (t1 > t2) throw Error(Errc::invalid_input, "bivariate density: need t1 <= t2");
    if (!(t1 > 0.0)) throw Error(Errc::invalid_input, "bivariate density: need t1 > 0");
    if (t1 == t2) throw Error(Errc::invalid_input, "bivariate density: singular when t1 = t2");
    check_before_maturity(t2, spec_.T, "bivariate_ad_density");
}

double BivariateAD::operator()(double x1, double x2) const {
    const double T = spec_.T;
    const double c = std::sqrt(T / (t1_ * (T - t2_) * (t2_ - t1_))) / (2.0 * M_PI);
    const double d1 = x1 - t1_ * x2 / t2_;
    const double g = std::exp(-t2_ * d1 * d1 / (2.0 * t1_ * (t2_ - t1_)));
    double m = 0.0;
    for (std::size_t j = 0; j < payoff_.size(); ++j) {
        const double d2 = x2 - spec_.sigma * payoff_.h[j] * t2_;
        m += payoff_.p[j] * std::exp(-T * d2 * d2 / (2.0 * t2_ * (T - t2_)));
    }
    return c * g * m;
}

BivariateAD bivariate_ad_density(const InfoSpec& spec, const DiscretePayoff& payoff, double t1, double t2) {
    return BivariateAD(spec, payoff, t1, t2);
}

} // namespace infoflow
