#pragma once

#include "infoflow/core.hpp"

#include <optional>
#include <utility>

namespace infoflow {

// P_0t for t >= 0. Flat continuously-compounded rate, or a table of discount
// factors interpolated log-linearly (flat forward beyond the last node).
class DiscountCurve {
public:
    DiscountCurve() = default;
    static DiscountCurve flat(double r);
    static DiscountCurve tabulated(std::vector<double> times, std::vector<double> discount);

    double P(double t) const;
    double P(double t, double T) const { return P(T) / P(t); }
    // r_t = -d ln P_0t / dt
    double short_rate(double t) const;

private:
    double r_ = 0.0;
    std::vector<double> t_, lp_; // lp_ = ln P_0t at nodes, t_[0] = 0
};

struct BondState {
    double t = 0.0, xi = 0.0;
    double price = 0.0;
    std::vector<double> probs;
    double mean = 0.0;     // H_tT
    double variance = 0.0; // V_tT
    double skew = 0.0;     // K_tT, third central moment
    double vol = 0.0;      // Sigma_tT
    double vol_of_vol = 0.0;
};

BondState price_bond(const DiscretePayoff& payoff, const InfoSpec& spec, const DiscountCurve& curve, double t,
                     double xi);

// (p0, p1) from the observed initial price of a bond paying h0 or h1 at T.
std::pair<double, double> implied_a_priori_probs(double B0T, const DiscountCurve& curve, double T, double h0,
                                                 double h1);

struct DigitalDecomposition {
    double digital = 0.0;        // D_tT
    double reconstruction = 0.0; // P_tT h0 + D_tT (h1 - h0)
    double sigma_bar = 0.0;
    double xi_bar = 0.0;
};

DigitalDecomposition digital_decomposition(const DiscretePayoff& payoff, const InfoSpec& spec,
                                           const DiscountCurve& curve, double t, double xi);

// Model restarted at t: rate sigma T/(T-t), horizon T-t, prior = posterior at (t, xi_t).
struct Reinitialized {
    InfoSpec spec;
    DiscretePayoff payoff;
    double start = 0.0;
    double xi_start = 0.0;
    double horizon = 0.0; // original T

    // Information value of the restarted process at original time u in [start, T).
    double eta(double u, double xi_u) const { return xi_u - (horizon - u) / (horizon - start) * xi_start; }
    std::vector<double> probs(double u, double xi_u) const;
};

Reinitialized reinitialize(const InfoSpec& spec, const DiscretePayoff& payoff, double t, double xi_t);

// 1 / (sigma^2 (h1 - h0)^2); +infinity when sigma = 0.
double information_timescale(const InfoSpec& spec, const DiscretePayoff& payoff);

struct BondPaths {
    std::vector<double> t;
    std::vector<std::vector<double>> price; // [path][grid point]
    std::vector<double> terminal;           // drawn H_T per path
};

// Grid points at T report the revealed payoff. forced_value pins H_T on every path.
BondPaths simulate_bond_paths(const DiscretePayoff& payoff, const InfoSpec& spec, const DiscountCurve& curve,
                              const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                              std::optional<double> forced_value = std::nullopt);

} // namespace infoflow
