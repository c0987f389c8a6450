#include "infoflow/xfactor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace infoflow {

namespace {

constexpr std::size_t kMaxEnumeration = 1u << 16;
constexpr std::size_t kMaxContinuous = 3;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

int CashFlowGraph::add_factor(XFactor f) {
    if (f.id.empty()) throw Error(Errc::invalid_input, "factor: empty id");
    if (index(f.id) >= 0) throw Error(Errc::invalid_input, "factor '" + f.id + "' registered twice");
    if (!(f.T > 0.0)) throw Error(Errc::invalid_input, "factor '" + f.id + "': revelation date must be positive");
    if (!(f.sigma >= 0.0)) throw Error(Errc::invalid_input, "factor '" + f.id + "': sigma must be >= 0");
    std::visit([](const auto& d) { d.validate(); }, f.dist);
    factors_.push_back(std::move(f));
    return static_cast<int>(factors_.size()) - 1;
}

int CashFlowGraph::index(const std::string& id) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
        if (factors_[i].id == id) return static_cast<int>(i);
    return -1;
}

void CashFlowGraph::add_flow(double T, const std::string& text) {
    if (!(T > 0.0)) throw Error(Errc::invalid_input, "cash flow: payment date must be positive");
    CashFlow f;
    f.T = T;
    f.payout = Expr::parse(text, [this](const std::string& id) { return index(id); });
    for (int v : f.payout.vars())
        if (factors_[v].T > T * (1.0 + 1e-12))
            throw Error(Errc::invalid_input,
                        "cash flow at " + num(T) + " references factor '" + factors_[v].id + "' revealed later");
    flows_.push_back(std::move(f));
}

FactorStates::FactorStates(const CashFlowGraph& g, const MarketScenario& s) {
    if (!(s.t >= 0.0)) throw Error(Errc::invalid_input, "scenario: time must be >= 0");
    for (const auto& [id, v] : s.xi)
        if (g.index(id) < 0) throw Error(Errc::invalid_input, "scenario: unknown factor '" + id + "'");
    for (const auto& [id, v] : s.realized)
        if (g.index(id) < 0) throw Error(Errc::invalid_input, "scenario: unknown factor '" + id + "'");
    for (const auto& f : g.factors()) {
        State st;
        if (f.T <= s.t) {
            auto it = s.realized.find(f.id);
            if (it == s.realized.end())
                throw Error(Errc::invalid_input, "scenario: factor '" + f.id + "' is revealed but has no realised value");
            st.resolved = true;
            st.support = {it->second};
            st.weights = {1.0};
        } else {
            double xi = 0.0;
            auto it = s.xi.find(f.id);
            if (it != s.xi.end()) xi = it->second;
            else if (s.t != 0.0)
                throw Error(Errc::invalid_input, "scenario: missing information value for factor '" + f.id + "'");
            const InfoSpec spec{f.sigma, f.T};
            if (auto d = std::get_if<DiscretePayoff>(&f.dist)) {
                st.support = d->h;
                st.weights = conditional_probs(*d, spec, s.t, xi);
            } else {
                st.posterior = std::make_shared<Posterior>(std::get<ContinuousDensity>(f.dist), spec, s.t, xi);
            }
        }
        states_.push_back(std::move(st));
    }
}

double FactorStates::moment(int f, int k) const {
    const State& st = states_[f];
    if (st.posterior) return st.posterior->moment(k);
    double m = 0.0;
    for (std::size_t i = 0; i < st.support.size(); ++i) m += st.weights[i] * std::pow(st.support[i], k);
    return m;
}

namespace {

// E[payout * X_extra^(extra >= 0)] under the factor states.
double expectation(const CashFlow& flow, const CashFlowGraph& g, const FactorStates& st, int extra,
                   std::uint64_t seed, std::size_t mc_paths, AssetPrice& info) {
    const Expr& e = flow.payout;
    if (e.polynomial()) {
        Poly p = e.expand();
        if (extra >= 0) p = poly_mul(p, Poly{{Monomial{{extra, 1}}, 1.0}});
        double v = 0.0;
        for (const auto& [m, c] : p) {
            double term = c;
            for (const auto& [var, pw] : m) term *= st.moment(var, pw);
            v += term;
        }
        if (info.method.empty()) info.method = "factorized";
        return v;
    }

    std::set<int> used;
    for (int v : e.vars()) used.insert(v);
    if (extra >= 0) used.insert(extra);
    std::vector<int> disc, cont;
    std::size_t combos = 1;
    for (int v : used) {
        if (!st.resolved(v) && !st.discrete(v)) {
            cont.push_back(v);
        } else {
            disc.push_back(v);
            combos = combos > kMaxEnumeration ? combos : combos * st.support(v).size();
        }
    }
    if (cont.size() > kMaxContinuous)
        throw Error(Errc::unsupported, "payout over more than 3 continuous factors has no product form");
    std::vector<double> x(g.factors().size(), 0.0);
    auto payoff = [&]() { return e.eval(x) * (extra >= 0 ? x[extra] : 1.0); };

    if (combos > kMaxEnumeration) {
        if (!cont.empty())
            throw Error(Errc::unsupported, "payout too large to enumerate and has continuous factors");
        std::vector<double> vals(mc_paths);
        parallel_for(mc_paths, [&](std::size_t b, std::size_t end) {
            std::vector<double> y(g.factors().size(), 0.0);
            for (std::size_t k = b; k < end; ++k) {
                Stream s(seed, k, 7);
                for (int v : disc) {
                    const auto& w = st.weights(v);
                    const double u = s.uniform();
                    double acc = 0.0;
                    std::size_t i = 0;
                    for (; i + 1 < w.size(); ++i) {
                        acc += w[i];
                        if (u < acc) break;
                    }
                    y[v] = st.support(v)[i];
                }
                vals[k] = e.eval(y) * (extra >= 0 ? y[extra] : 1.0);
            }
        });
        double m = 0.0, q = 0.0;
        for (double v : vals) m += v;
        m /= static_cast<double>(mc_paths);
        for (double v : vals) q += (v - m) * (v - m);
        const double se = std::sqrt(q / (mc_paths - 1.0) / mc_paths);
        info.std_error = std::sqrt(info.std_error * info.std_error + se * se);
        info.method = "monte-carlo";
        return m;
    }

    // nested quadrature over the continuous posteriors
    std::function<double(std::size_t)> inner = [&](std::size_t level) -> double {
        if (level == cont.size()) return payoff();
        const int v = cont[level];
        return st.posterior(v).expect(
            [&, v, level](double z) {
                x[v] = z;
                return inner(level + 1);
            },
            1e-10);
    };
    std::function<double(std::size_t)> enumerate = [&](std::size_t level) -> double {
        if (level == disc.size()) return inner(0);
        const int v = disc[level];
        double s = 0.0;
        for (std::size_t i = 0; i < st.support(v).size(); ++i) {
            if (st.weights(v)[i] == 0.0) continue;
            x[v] = st.support(v)[i];
            s += st.weights(v)[i] * enumerate(level + 1);
        }
        return s;
    };
    if (info.method != "monte-carlo") info.method = cont.empty() ? "enumeration" : "quadrature";
    return enumerate(0);
}

} // namespace

AssetPrice price_asset_detailed(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve,
                                std::uint64_t seed, std::size_t mc_paths) {
    const FactorStates st(g, s);
    AssetPrice out;
    for (std::size_t k = 0; k < g.flows().size(); ++k) {
        const auto& f = g.flows()[k];
        if (f.T <= s.t) continue; // ex-dividend
        out.value += curve.P(s.t, f.T) * expectation(f, g, st, -1, seed + k, mc_paths, out);
    }
    if (out.method.empty()) out.method = "factorized";
    return out;
}

double price_asset(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve) {
    return price_asset_detailed(g, s, curve).value;
}

VolatilityVector volatility_vector(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve) {
    const FactorStates st(g, s);
    VolatilityVector out;
    AssetPrice info;
    double sum2 = 0.0;
    for (std::size_t a = 0; a < g.factors().size(); ++a) {
        const auto& f = g.factors()[a];
        out.ids.push_back(f.id);
        double gam = 0.0;
        if (!st.resolved(static_cast<int>(a))) {
            const double ex = st.moment(static_cast<int>(a), 1);
            double cov = 0.0;
            for (const auto& flow : g.flows()) {
                if (flow.T <= s.t) continue;
                const double exy = expectation(flow, g, st, static_cast<int>(a), 0, 1u << 18, info);
                const double ey = expectation(flow, g, st, -1, 0, 1u << 18, info);
                cov += curve.P(s.t, flow.T) * (exy - ey * ex);
            }
            gam = f.sigma * f.T / (f.T - s.t) * cov;
        }
        out.gamma.push_back(gam);
        sum2 += gam * gam;
    }
    out.total = std::sqrt(sum2);
    return out;
}

CashFlowGraph coupon_bond_graph(const CouponBondSpec& spec) {
    const std::size_t n = spec.dates.size();
    if (n == 0 || spec.recovery.size() != n || spec.survival.size() != n || spec.sigma.size() != n)
        throw Error(Errc::invalid_input, "coupon bond: dates, recovery, survival and sigma must have equal length");
    CashFlowGraph g;
    for (std::size_t k = 0; k < n; ++k) {
        if (!(spec.recovery[k] >= 0.0 && spec.recovery[k] < 1.0))
            throw Error(Errc::invalid_input, "coupon bond: recovery rates must lie in [0,1)");
        if (k > 0 && !(spec.dates[k] > spec.dates[k - 1]))
            throw Error(Errc::invalid_input, "coupon bond: dates must increase");
        g.add_factor({"X" + std::to_string(k + 1), spec.dates[k], DiscretePayoff::binary(0.0, 1.0, spec.survival[k]),
                      spec.sigma[k]});
    }
    const double cp = spec.coupon + spec.principal;
    std::string prefix; // X1*...*X(k-1)*
    for (std::size_t k = 0; k < n; ++k) {
        const std::string x = "X" + std::to_string(k + 1);
        const double pay = k + 1 == n ? cp : spec.coupon;
        std::string e = num(pay) + "*" + prefix + x;
        if (spec.recovery[k] > 0.0) e += " + " + num(spec.recovery[k] * cp) + "*" + prefix + "(1-" + x + ")";
        g.add_flow(spec.dates[k], e);
        prefix += x + "*";
    }
    return g;
}

double price_coupon_bond(const CouponBondSpec& spec, const MarketScenario& s, const DiscountCurve& curve) {
    return price_asset(coupon_bond_graph(spec), s, curve);
}

double price_cds(const CdsSpec& spec, double t, double xi1, double xi2, const DiscountCurve& curve) {
    if (!(spec.T2 > spec.T1)) throw Error(Errc::invalid_input, "cds: need T1 < T2");
    const auto d1 = DiscretePayoff::binary(0.0, 1.0, spec.survival1);
    const auto d2 = DiscretePayoff::binary(0.0, 1.0, spec.survival2);
    const double E1 = conditional_probs(d1, {spec.sigma1, spec.T1}, t, xi1)[1];
    const double E2 = conditional_probs(d2, {spec.sigma2, spec.T2}, t, xi2)[1];
    const double P1 = curve.P(t, spec.T1), P2 = curve.P(t, spec.T2);
    const double g = spec.g, n = spec.n;
    return -n * P1 + ((g + n) * P1 - n * P2) * E1 + (g + n) * P2 * E1 * E2;
}

namespace {

void check_basket(const BasketSpec& spec) {
    if (spec.N < 1) throw Error(Errc::invalid_input, "basket: need N >= 1");
    if (spec.N > 12) throw Error(Errc::unsupported, "basket: N > 12 exceeds the supported tree size");
    if (static_cast<int>(spec.dates.size()) != spec.N) throw Error(Errc::invalid_input, "basket: need N dates");
    for (int i = 1; i < spec.N; ++i)
        if (!(spec.dates[i] > spec.dates[i - 1])) throw Error(Errc::invalid_input, "basket: dates must increase");
}

double basket_survival(const BasketSpec& spec, const std::string& w) {
    auto it = spec.survival.find(w);
    if (it == spec.survival.end())
        throw Error(Errc::invalid_input, "basket: missing survival probability for factor X" + w);
    return it->second;
}

double basket_sigma(const BasketSpec& spec, const std::string& w) {
    auto it = spec.sigma.find(w);
    return it == spec.sigma.end() ? spec.default_sigma : it->second;
}

} // namespace

std::vector<double> price_basket(const BasketSpec& spec, const MarketScenario& s, const DiscountCurve& curve) {
    check_basket(spec);
    // conditional mean of X_w
    auto mean = [&](const std::string& w) {
        const std::string id = "X" + w;
        const double T = spec.dates[w.size()];
        if (T <= s.t) {
            auto it = s.realized.find(id);
            if (it == s.realized.end())
                throw Error(Errc::invalid_input, "scenario: factor '" + id + "' is revealed but has no realised value");
            return it->second;
        }
        double xi = 0.0;
        auto it = s.xi.find(id);
        if (it != s.xi.end()) xi = it->second;
        else if (s.t != 0.0) throw Error(Errc::invalid_input, "scenario: missing information value for factor '" + id + "'");
        return conditional_probs(DiscretePayoff::binary(0.0, 1.0, basket_survival(spec, w)),
                                 {basket_sigma(spec, w), T}, s.t, xi)[1];
    };
    std::vector<double> value(spec.N, 0.0);
    // weight = E of the path indicator leading to w
    std::function<void(const std::string&, double)> walk = [&](const std::string& w, double weight) {
        const int k = static_cast<int>(w.size()); // bond k+1 is decided by X_w
        if (weight == 0.0 && k > 0) return;
        const double m = mean(w);
        if (spec.dates[k] > s.t) value[k] += weight * m;
        if (k + 1 < spec.N) {
            walk(w + "1", weight * m);
            walk(w + "0", weight * (1.0 - m));
        }
    };
    walk("", 1.0);
    for (int k = 0; k < spec.N; ++k) value[k] *= spec.dates[k] > s.t ? curve.P(s.t, spec.dates[k]) : 0.0;
    return value;
}

CashFlowGraph basket_graph(const BasketSpec& spec) {
    check_basket(spec);
    CashFlowGraph g;
    std::vector<std::string> level{""};
    for (int k = 0; k < spec.N; ++k) {
        std::vector<std::string> next;
        std::string flow;
        for (const auto& w : level) {
            g.add_factor({"X" + w, spec.dates[k], DiscretePayoff::binary(0.0, 1.0, basket_survival(spec, w)),
                          basket_sigma(spec, w)});
            std::string term;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const std::string parent = "X" + w.substr(0, i);
                term += (w[i] == '1' ? parent : "(1-" + parent + ")") + "*";
            }
            flow += (flow.empty() ? "" : " + ") + term + "X" + w;
            next.push_back(w + "1");
            next.push_back(w + "0");
        }
        g.add_flow(spec.dates[k], flow);
        level = std::move(next);
    }
    return g;
}

HomogeneousBasketValue homogeneous_basket_value(const HomogeneousBasketSpec& spec, double t,
                                                const std::vector<double>& xi, const DiscountCurve& curve) {
    if (spec.n < 1 || static_cast<int>(spec.q.size()) != spec.n || static_cast<int>(spec.sigma.size()) != spec.n ||
        static_cast<int>(xi.size()) != spec.n)
        throw Error(Errc::invalid_input, "homogeneous basket: need n probabilities, sigmas and information values");
    const double P = curve.P(t, spec.T);
    HomogeneousBasketValue out;
    double prod = 1.0, sum = 0.0;
    for (int j = 0; j < spec.n; ++j) {
        const auto d = DiscretePayoff::binary(0.0, 1.0, spec.q[j]);
        prod *= conditional_probs(d, {spec.sigma[j], spec.T}, t, xi[j])[1];
        sum += prod;
        out.tranche.push_back(P * prod);
    }
    out.value = P * (spec.n - sum);
    return out;
}

CorrelatedPair correlated_pair(const CorrelatedPairSpec& spec, const MarketScenario& s, const DiscountCurve& curve) {
    if (!(spec.T2 > spec.T1)) throw Error(Errc::invalid_input, "correlated pair: need T1 < T2");
    CorrelatedPair out;
    if (!(spec.R2b > spec.R2a && spec.R2a > spec.R2c))
        out.warnings.push_back("recovery ladder is not ordered R2b > R2a > R2c");
    auto graph = [&](int which) {
        CashFlowGraph g;
        g.add_factor({"X1", spec.T1, DiscretePayoff::binary(0.0, 1.0, spec.survival1), spec.sigma1});
        g.add_factor({"X2", spec.T2, DiscretePayoff::binary(0.0, 1.0, spec.survival2), spec.sigma2});
        if (which == 1)
            g.add_flow(spec.T1, num(spec.n1) + "*X1 + " + num(spec.R1 * spec.n1) + "*(1-X1)");
        else
            g.add_flow(spec.T2, num(spec.n2) + "*X1*X2 + " + num(spec.R2a * spec.n2) + "*(1-X1)*X2 + " +
                                    num(spec.R2b * spec.n2) + "*X1*(1-X2) + " + num(spec.R2c * spec.n2) +
                                    "*(1-X1)*(1-X2)");
        return g;
    };
    const CashFlowGraph g1 = graph(1), g2 = graph(2);
    out.price1 = price_asset(g1, s, curve);
    out.price2 = price_asset(g2, s, curve);
    out.vol1 = volatility_vector(g1, s, curve);
    out.vol2 = volatility_vector(g2, s, curve);
    double dot = 0.0;
    for (std::size_t i = 0; i < out.vol1.gamma.size(); ++i) dot += out.vol1.gamma[i] * out.vol2.gamma[i];
    const double den = out.vol1.total * out.vol2.total;
    out.correlation = den > 0.0 ? dot / den : 0.0;
    return out;
}

} // namespace infoflow
