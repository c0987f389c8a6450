#include "infoflow/credit.hpp"

#include <algorithm>
#include <cmath>

namespace infoflow {

DiscountCurve DiscountCurve::flat(double r) {
    if (!std::isfinite(r)) throw Error(Errc::invalid_input, "curve: rate must be finite");
    DiscountCurve c;
    c.r_ = r;
    return c;
}

DiscountCurve DiscountCurve::tabulated(std::vector<double> times, std::vector<double> discount) {
    if (times.empty() || times.size() != discount.size())
        throw Error(Errc::invalid_input, "curve: times and discount factors must match");
    DiscountCurve c;
    if (times.front() != 0.0) {
        times.insert(times.begin(), 0.0);
        discount.insert(discount.begin(), 1.0);
    }
    if (discount.front() != 1.0) throw Error(Errc::invalid_input, "curve: P(0) must be 1");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) throw Error(Errc::invalid_input, "curve: times must increase");
        if (!(discount[i] > 0.0 && discount[i] <= 1.0)) throw Error(Errc::invalid_input, "curve: P must lie in (0,1]");
        if (i > 0 && !(discount[i] < discount[i - 1]))
            throw Error(Errc::invalid_input, "curve: discount factors must strictly decrease");
        c.lp_.push_back(std::log(discount[i]));
    }
    c.t_ = std::move(times);
    if (c.t_.size() == 1) c.r_ = 0.0;
    return c;
}

double DiscountCurve::P(double t) const {
    if (t < 0.0) throw Error(Errc::invalid_input, "curve: negative time");
    if (t_.size() < 2) return std::exp(-r_ * t);
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t j = std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
    std::size_t i = j - 1;
    const double w = (t - t_[i]) / (t_[j] - t_[i]);
    return std::exp(lp_[i] + w * (lp_[j] - lp_[i]));
}

double DiscountCurve::short_rate(double t) const {
    if (t_.size() < 2) return r_;
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t j = std::min<std::size_t>(it - t_.begin(), t_.size() - 1);
    std::size_t i = j - 1;
    return -(lp_[j] - lp_[i]) / (t_[j] - t_[i]);
}

BondState price_bond(const DiscretePayoff& payoff, const InfoSpec& spec, const DiscountCurve& curve, double t,
                     double xi) {
    payoff.validate();
    spec.validate();
    BondState s;
    s.t = t;
    s.xi = xi;
    s.probs = conditional_probs(payoff, spec, t, xi);
    for (std::size_t i = 0; i < payoff.size(); ++i) s.mean += payoff.h[i] * s.probs[i];
    for (std::size_t i = 0; i < payoff.size(); ++i) {
        const double d = payoff.h[i] - s.mean;
        s.variance += d * d * s.probs[i];
        s.skew += d * d * d * s.probs[i];
    }
    const double P = curve.P(t, spec.T);
    const double k = spec.sigma * spec.T / (spec.T - t);
    s.price = P * s.mean;
    s.vol = k * P * s.variance;
    s.vol_of_vol = k * k * P * s.skew;
    return s;
}

std::pair<double, double> implied_a_priori_probs(double B0T, const DiscountCurve& curve, double T, double h0,
                                                 double h1) {
    if (!(h1 > h0)) throw Error(Errc::invalid_input, "implied probabilities: need h1 > h0");
    const double P = curve.P(T);
    if (!(B0T > P * h0 && B0T < P * h1))
        throw Error(Errc::no_solution, "implied probabilities: price outside (P h0, P h1)");
    const double x = B0T / P;
    return {(h1 - x) / (h1 - h0), (x - h0) / (h1 - h0)};
}

DigitalDecomposition digital_decomposition(const DiscretePayoff& payoff, const InfoSpec& spec,
                                           const DiscountCurve& curve, double t, double xi) {
    if (payoff.size() != 2) throw Error(Errc::invalid_input, "digital decomposition: payoff must be binary");
    payoff.validate();
    check_before_maturity(t, spec.T, "digital_decomposition");
    const double h0 = payoff.h[0], h1 = payoff.h[1], p0 = payoff.p[0], p1 = payoff.p[1];
    DigitalDecomposition d;
    d.sigma_bar = spec.sigma * (h1 - h0);
    // the digital's information process, sigma_bar X t + beta, read off the same path
    d.xi_bar = xi - spec.sigma * h0 * t;
    const double P = curve.P(t, spec.T);
    const double E = spec.T / (spec.T - t) * (d.sigma_bar * d.xi_bar - 0.5 * d.sigma_bar * d.sigma_bar * t);
    double q; // conditional probability of the digital paying
    if (p1 == 0.0)
        q = 0.0;
    else if (p0 == 0.0)
        q = 1.0;
    else
        q = 1.0 / (1.0 + (p0 / p1) * std::exp(-E));
    d.digital = P * q;
    d.reconstruction = P * h0 + d.digital * (h1 - h0);
    return d;
}

std::vector<double> Reinitialized::probs(double u, double xi_u) const {
    return conditional_probs(payoff, spec, u - start, eta(u, xi_u));
}

Reinitialized reinitialize(const InfoSpec& spec, const DiscretePayoff& payoff, double t, double xi_t) {
    spec.validate();
    payoff.validate();
    check_before_maturity(t, spec.T, "reinitialize");
    Reinitialized r;
    r.spec.sigma = spec.sigma * spec.T / (spec.T - t);
    r.spec.T = spec.T - t;
    r.payoff.h = payoff.h;
    r.payoff.p = conditional_probs(payoff, spec, t, xi_t);
    r.start = t;
    r.xi_start = xi_t;
    r.horizon = spec.T;
    return r;
}

double information_timescale(const InfoSpec& spec, const DiscretePayoff& payoff) {
    if (payoff.size() != 2) throw Error(Errc::invalid_input, "information timescale: payoff must be binary");
    const double s = spec.sigma * (payoff.h[1] - payoff.h[0]);
    return s == 0.0 ? INFINITY : 1.0 / (s * s);
}

BondPaths simulate_bond_paths(const DiscretePayoff& payoff, const InfoSpec& spec, const DiscountCurve& curve,
                              const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                              std::optional<double> forced_value) {
    payoff.validate();
    spec.validate();
    grid.validate();
    if (grid.T != spec.T) throw Error(Errc::invalid_input, "simulate: grid horizon differs from bond maturity");
    BondPaths out;
    out.t = grid.t;
    out.price.assign(n_paths, std::vector<double>(grid.t.size()));
    out.terminal.assign(n_paths, 0.0);
    const Factor factor = payoff;
    parallel_for(n_paths, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const PathSample xi = forced_value ? information_path_given(spec, *forced_value, grid, seed, k)
                                               : sample_information_path(spec, factor, grid, seed, k);
            out.terminal[k] = xi.factor;
            for (std::size_t i = 0; i < grid.t.size(); ++i) {
                const double t = grid.t[i];
                out.price[k][i] = t >= spec.T - kMaturityEps * spec.T
                                      ? xi.factor
                                      : price_bond(payoff, spec, curve, t, xi.v[i]).price;
            }
        }
    });
    return out;
}

} // namespace infoflow
