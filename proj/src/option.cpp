#include "infoflow/option.hpp"

#include <cmath>

namespace infoflow {

void OptionSpec::validate() const {
    payoff.validate();
    spec.validate();
    if (!(t > 0.0)) throw Error(Errc::invalid_input, "option: exercise date must be positive");
    check_before_maturity(t, spec.T, "option");
    if (!(K > 0.0) || !std::isfinite(K)) throw Error(Errc::invalid_input, "option: strike must be positive");
}

const char* branch_name(CallBranch b) {
    switch (b) {
    case CallBranch::in_the_money: return "analytic-in-the-money";
    case CallBranch::out_of_the_money: return "analytic-out-of-the-money";
    case CallBranch::interior: return "interior";
    }
    return "unknown";
}

CallBranch call_branch(const OptionSpec& opt) {
    opt.validate();
    const double P = opt.curve.P(opt.t, opt.spec.T);
    if (opt.K <= P * opt.payoff.h.front()) return CallBranch::in_the_money;
    if (opt.K >= P * opt.payoff.h.back()) return CallBranch::out_of_the_money;
    return CallBranch::interior;
}

namespace {

double itm_value(const OptionSpec& opt) {
    return opt.curve.P(opt.spec.T) * opt.payoff.mean() - opt.curve.P(opt.t) * opt.K;
}

} // namespace

double price_binary_call(const OptionSpec& opt) {
    if (opt.payoff.size() != 2) throw Error(Errc::invalid_input, "binary call: payoff must be binary");
    switch (call_branch(opt)) {
    case CallBranch::in_the_money: return itm_value(opt);
    case CallBranch::out_of_the_money: return 0.0;
    case CallBranch::interior: break;
    }
    const double T = opt.spec.T, t = opt.t, sigma = opt.spec.sigma;
    const double P = opt.curve.P(t, T), P0t = opt.curve.P(t);
    const double h0 = opt.payoff.h[0], h1 = opt.payoff.h[1], p0 = opt.payoff.p[0], p1 = opt.payoff.p[1];
    const double a = P * h1 - opt.K, b = opt.K - P * h0;
    if (p1 == 0.0) return 0.0;
    if (p0 == 0.0) return P0t * a;
    const double tau = t * T / (T - t);
    const double s = sigma * std::sqrt(tau) * (h1 - h0);
    const double L = std::log(p1 * a / (p0 * b));
    if (s == 0.0) return P0t * std::max(0.0, p1 * a - p0 * b);
    const double dp = (L + 0.5 * s * s) / s, dm = (L - 0.5 * s * s) / s;
    return P0t * (p1 * a * norm_cdf(dp) - p0 * b * norm_cdf(dm));
}

double critical_information(const OptionSpec& opt) {
    const double T = opt.spec.T, t = opt.t, sigma = opt.spec.sigma;
    const double P = opt.curve.P(t, T);
    const double k = T / (T - t);
    const auto& h = opt.payoff.h;
    const auto& p = opt.payoff.p;
    // sign of the inner sum, from log-sums of its positive and negative parts
    auto sign = [&](double x) {
        std::vector<double> pos, neg;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double c = p[i] * (P * h[i] - opt.K);
            if (c == 0.0) continue;
            const double e = std::log(std::abs(c)) + k * (sigma * h[i] * x - 0.5 * sigma * sigma * h[i] * h[i] * t);
            (c > 0 ? pos : neg).push_back(e);
        }
        if (pos.empty()) return -1.0;
        if (neg.empty()) return 1.0;
        return log_sum_exp(pos) - log_sum_exp(neg);
    };
    const double w = std::sqrt(t * (T - t) / T);
    double lo = -50.0 * w, hi = 50.0 * w;
    for (int i = 0; i < 200 && sign(lo) > 0; ++i) lo *= 2.0;
    for (int i = 0; i < 200 && sign(hi) < 0; ++i) hi *= 2.0;
    if (!(sign(lo) <= 0 && sign(hi) >= 0)) throw Error(Errc::no_solution, "critical information value not bracketed");
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (sign(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double price_multirecovery_call(const OptionSpec& opt) {
    switch (call_branch(opt)) {
    case CallBranch::in_the_money: return itm_value(opt);
    case CallBranch::out_of_the_money: return 0.0;
    case CallBranch::interior: break;
    }
    const double T = opt.spec.T, t = opt.t, sigma = opt.spec.sigma;
    const double P = opt.curve.P(t, T), P0t = opt.curve.P(t);
    if (sigma == 0.0) return P0t * std::max(0.0, P * opt.payoff.mean() - opt.K);
    const double tau = t * T / (T - t);
    const double Z = critical_information(opt) / std::sqrt(t * (T - t) / T);
    double c = 0.0;
    for (std::size_t i = 0; i < opt.payoff.size(); ++i)
        c += opt.payoff.p[i] * (P * opt.payoff.h[i] - opt.K) * norm_cdf(sigma * opt.payoff.h[i] * std::sqrt(tau) - Z);
    return P0t * c;
}

double option_price_process(const OptionSpec& opt, double s, double xi_s) {
    opt.validate();
    if (opt.payoff.size() != 2) throw Error(Errc::invalid_input, "option price process: payoff must be binary");
    if (s < 0.0 || s > opt.t) throw Error(Errc::invalid_input, "option price process: need 0 <= s <= t");
    const double T = opt.spec.T, t = opt.t, sigma = opt.spec.sigma;
    const double h0 = opt.payoff.h[0], h1 = opt.payoff.h[1];
    const double P = opt.curve.P(t, T);
    const auto pi = conditional_probs(opt.payoff, opt.spec, s, xi_s);
    if (s == t) return std::max(0.0, P * (h0 * pi[0] + h1 * pi[1]) - opt.K);
    const double Pst = opt.curve.P(s, t);
    const double a = P * h1 - opt.K, b = opt.K - P * h0;
    if (a <= 0.0) return 0.0;
    if (b <= 0.0) return Pst * (P * (h0 * pi[0] + h1 * pi[1]) - opt.K);
    if (pi[1] == 0.0) return 0.0;
    if (pi[0] == 0.0) return Pst * a;
    const double v = std::sqrt((t - s) / ((T - t) * (T - s)));
    const double w = sigma * v * T * (h1 - h0);
    if (w == 0.0) return Pst * std::max(0.0, pi[1] * a - pi[0] * b);
    const double L = std::log(pi[1] * a / (pi[0] * b));
    const double dp = (L + 0.5 * w * w) / w, dm = (L - 0.5 * w * w) / w;
    return Pst * (pi[1] * a * norm_cdf(dp) - pi[0] * b * norm_cdf(dm));
}

OptionGreeks greeks(const OptionSpec& opt) {
    if (opt.payoff.size() != 2) throw Error(Errc::invalid_input, "greeks: payoff must be binary");
    if (call_branch(opt) != CallBranch::interior)
        throw Error(Errc::greeks_undefined, "greeks: strike outside (P_tT h0, P_tT h1)");
    const double T = opt.spec.T, t = opt.t, sigma = opt.spec.sigma;
    const double P = opt.curve.P(t, T), P0t = opt.curve.P(t);
    const double h0 = opt.payoff.h[0], h1 = opt.payoff.h[1], p0 = opt.payoff.p[0], p1 = opt.payoff.p[1];
    if (!(p0 > 0.0 && p1 > 0.0 && sigma > 0.0))
        throw Error(Errc::greeks_undefined, "greeks: need 0 < p1 < 1 and sigma > 0");
    const double a = P * h1 - opt.K, b = opt.K - P * h0, dh = h1 - h0;
    const double tau = t * T / (T - t);
    const double L = std::log(p1 * a / (p0 * b));
    const double s2 = sigma * sigma * tau * dh * dh;
    const double A = L * L / s2 + 0.25 * s2;
    OptionGreeks g;
    g.vega = P0t / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * A) * dh * std::sqrt(tau * p0 * p1 * a * b);
    const double s = std::sqrt(s2);
    g.delta = (a * norm_cdf((L + 0.5 * s2) / s) + b * norm_cdf((L - 0.5 * s2) / s)) / (P * dh);
    return g;
}

} // namespace infoflow
