#pragma once

#include "infoflow/credit.hpp"
#include "infoflow/expr.hpp"

#include <map>
#include <string>

namespace infoflow {

// Independent market factor revealed at T, with its own information process
// xi = sigma X t + bridge over [0, T].
struct XFactor {
    std::string id;
    double T = 1.0;
    Factor dist;
    double sigma = 1.0;
};

struct CashFlow {
    double T = 0.0;
    Expr payout;
};

class CashFlowGraph {
public:
    int add_factor(XFactor f);
    // The payout may only reference factors revealed on or before T.
    void add_flow(double T, const std::string& expr);

    const std::vector<XFactor>& factors() const { return factors_; }
    const std::vector<CashFlow>& flows() const { return flows_; }
    int index(const std::string& id) const; // -1 when unknown

private:
    std::vector<XFactor> factors_;
    std::vector<CashFlow> flows_;
};

// Information values of live factors at time t and realised values of factors with T <= t.
// A live factor missing from xi is read as xi = 0, which is only meaningful at t = 0.
struct MarketScenario {
    double t = 0.0;
    std::map<std::string, double> xi;
    std::map<std::string, double> realized;
};

struct AssetPrice {
    double value = 0.0;
    double std_error = 0.0; // nonzero only for Monte Carlo
    std::string method;     // "factorized", "enumeration", "quadrature" or "monte-carlo"
};

// Conditional law of each factor under a scenario.
class FactorStates {
public:
    FactorStates(const CashFlowGraph& g, const MarketScenario& s);
    double moment(int f, int k) const;
    bool resolved(int f) const { return states_[f].resolved; }
    bool discrete(int f) const { return states_[f].posterior == nullptr; }
    // Support and weights of a discrete or resolved factor.
    const std::vector<double>& support(int f) const { return states_[f].support; }
    const std::vector<double>& weights(int f) const { return states_[f].weights; }
    const Posterior& posterior(int f) const { return *states_[f].posterior; }

private:
    struct State {
        bool resolved = false;
        std::vector<double> support, weights;
        std::shared_ptr<Posterior> posterior;
    };
    std::vector<State> states_;
};

AssetPrice price_asset_detailed(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve,
                                std::uint64_t seed = 0, std::size_t mc_paths = 1u << 18);
double price_asset(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve);

struct VolatilityVector {
    std::vector<std::string> ids;
    std::vector<double> gamma; // per factor, zero for resolved ones
    double total = 0.0;
};

VolatilityVector volatility_vector(const CashFlowGraph& g, const MarketScenario& s, const DiscountCurve& curve);

// Defaultable coupon bond: coupon c on each date, principal p on the last.
// survival[k] is the probability that X_k = 1 (no default in period k).
struct CouponBondSpec {
    double coupon = 0.0, principal = 1.0;
    std::vector<double> dates, recovery, survival, sigma;
};
// Factors are named X1..Xn.
CashFlowGraph coupon_bond_graph(const CouponBondSpec& spec);
double price_coupon_bond(const CouponBondSpec& spec, const MarketScenario& s, const DiscountCurve& curve);

// Default swap on a two-coupon reference bond: premium g, protection n.
struct CdsSpec {
    double g = 0.0, n = 0.0;
    double T1 = 1.0, T2 = 2.0;
    double survival1 = 1.0, survival2 = 1.0;
    double sigma1 = 1.0, sigma2 = 1.0;
};
double price_cds(const CdsSpec& spec, double t, double xi1, double xi2, const DiscountCurve& curve);

// Chronological basket of N digital bonds. X_w for binary strings w of length
// < N is revealed at dates[len(w)]; character '1' records survival of the bond
// at that position. Factor ids are "X" + w.
struct BasketSpec {
    int N = 1;
    std::vector<double> dates;
    std::map<std::string, double> survival; // keyed by w
    std::map<std::string, double> sigma;    // keyed by w; missing entries use default_sigma
    double default_sigma = 1.0;
};
std::vector<double> price_basket(const BasketSpec& spec, const MarketScenario& s, const DiscountCurve& curve);
CashFlowGraph basket_graph(const BasketSpec& spec);

// H_T = n - Z1 - Z1 Z2 - ... - Z1...Zn with independent binary Z_j, P(Z_j = 1) = q[j].
struct HomogeneousBasketSpec {
    int n = 1;
    double T = 1.0;
    std::vector<double> q, sigma;
};
struct HomogeneousBasketValue {
    double value = 0.0;
    std::vector<double> tranche; // tranche[k-1] pays 1 when at least k defaults occur
};
HomogeneousBasketValue homogeneous_basket_value(const HomogeneousBasketSpec& spec, double t,
                                                const std::vector<double>& xi, const DiscountCurve& curve);

// Two bonds sharing the first factor: bond 1 pays n1 X1 + R1 n1 (1 - X1) at T1,
// bond 2 pays n2 times X1 X2 + R2a (1-X1) X2 + R2b X1 (1-X2) + R2c (1-X1)(1-X2) at T2.
struct CorrelatedPairSpec {
    double n1 = 1.0, n2 = 1.0, R1 = 0.0, R2a = 0.0, R2b = 0.0, R2c = 0.0;
    double T1 = 1.0, T2 = 2.0;
    double survival1 = 0.9, survival2 = 0.9;
    double sigma1 = 1.0, sigma2 = 1.0;
};
struct CorrelatedPair {
    double price1 = 0.0, price2 = 0.0, correlation = 0.0;
    VolatilityVector vol1, vol2;
    std::vector<std::string> warnings;
};
CorrelatedPair correlated_pair(const CorrelatedPairSpec& spec, const MarketScenario& s, const DiscountCurve& curve);

} // namespace infoflow
