#pragma once

#include "infoflow/core.hpp"
#include "infoflow/lattice.hpp"

#include <optional>

namespace infoflow {

// Pricing kernel pi_i on a scenario lattice, dates t_0 = 0 < t_1 < ... < t_N.
struct KernelModel {
    Lattice lattice;
    std::vector<double> dates;
    NodeField pi;

    void validate() const; // positivity and strict supermartingale property
    int horizon() const { return lattice.depth(); }
};

// P_ij at every node of date i, with the conventional quote P_ii = 1. The
// bond's ex-dividend value at its maturity is 0; see bond_value_ex_dividend.
std::vector<double> bond_price(const KernelModel& m, int i, int j);
// P[i][j - i][node] for all i <= j.
std::vector<std::vector<std::vector<double>>> bond_price_matrix(const KernelModel& m);
inline double bond_value_ex_dividend(const KernelModel& m, int i, int j, std::size_t node) {
    return i == j ? 0.0 : bond_price(m, i, j)[node];
}

// pi_i = alpha_i + beta_i N_i with N a positive martingale on a recombining
// binomial: N moves by u or d with up probability (1 - d)/(u - d).
struct RationalSpec {
    std::vector<double> alpha, beta, dates;
    double N0 = 1.0, u = 1.1, d = 0.9;

    void validate() const;
    double q() const { return (1.0 - d) / (u - d); }
    double N(int i, int ups) const;
};

KernelModel build_rational(const RationalSpec& spec);
double rational_bond_price(const RationalSpec& spec, int i, int j, int ups);

// Short rate r_{i} as a field over date i-1: 1 + r_i = pi_{i-1} / E_{i-1}[pi_i].
NodeField short_rates(const KernelModel& m);

// Money-market, Doob and martingale checks over every path of the lattice.
struct PathReport {
    std::size_t paths = 0;
    double bond_vs_account = 0.0;     // max |P_{i-1,i} - B_{i-1}/B_i|
    double rho_martingale = 0.0;      // max |E_{i-1}[pi_i B_i] - pi_{i-1} B_{i-1}|
    double account_closed_form = 0.0; // rational models: max |B_i - closed form|
    double rho_closed_form = 0.0;     // rational models: max |rho_i - closed form|
    double doob_identity = 0.0;       // max |pi - (Y - A)|
    double doob_short_rate = 0.0;     // max |A_i - sum pi_n r_{n+1} P_{n,n+1}|
    double doob_martingale = 0.0;     // max |E_i[Y_{i+1}] - Y_i|
    bool account_increasing = true;
    bool doob_increasing = true;
};

PathReport check_paths(const KernelModel& m, const std::optional<RationalSpec>& rational = std::nullopt);

// Money-market account along one path; bit i of `ups_path` is the move after date i.
std::vector<double> money_market_path(const KernelModel& m, std::uint64_t ups_path);

// Flesaker-Hughston family m_in = E_i[g_n], g_n = pi_{n-1} - E_{n-1}[pi_n] for
// n <= N and g_{N+1} = pi_N, the horizon tail.
struct FHRepresentation {
    // m[n][i][node] for 1 <= n <= N+1, 0 <= i < n
    std::vector<NodeField> m;
    double reconstruction_error = 0.0; // max |P_ij - ratio of tail sums|
    double martingale_error = 0.0;     // max |E_i[m_{i+1,n}] - m_in|
    bool positive = true;
};
FHRepresentation fh_representation(const KernelModel& m);

struct ConstantValueReport {
    double identity = 0.0;      // max |pi_i - E_i[pi_j] - E_i[sum_{i<n<=j} pi_n rbar_n]|
    double decomposition = 0.0; // max |pi_i - (E_i[G_N] - G_i + E_i[pi_N])|
    bool violation = false;
};

// Requires a tree lattice; Bbar must strictly increase along every edge.
ConstantValueReport constant_value_asset_check(const KernelModel& m, const NodeField& Bbar, double tol = 1e-12);

struct GKernel {
    KernelModel model;
    NodeField rbar, Bbar;
    double rho_martingale = 0.0; // max |E_{i-1}[pi_i Bbar_i] - pi_{i-1} Bbar_{i-1}|
};
// pi_i = E_i[G_N] - G_i + tail; G_0 = 0 and G strictly increasing along edges.
GKernel build_kernel_from_G(const Lattice& lattice, const std::vector<double>& dates, const NodeField& G,
                            double tail);

// One-period positive-return asset: risk-free growth B1/B0, risky asset S0 -> {U, D},
// candidate asset Sbar0 -> {Ubar, Dbar}. Returns the kernel and the asset on a one-period lattice.
struct OnePeriodExample {
    KernelModel model;
    NodeField Bbar;
    double p_star = 0.0;
    double Ubar = 0.0;
};
OnePeriodExample positive_return_example(double B0, double B1, double S0, double U, double D, double Sbar0,
                                         double Dbar, double q_up);

// Kernel driven by discrete-time information: pi_j = alpha_j + beta_j prod_a E[X_a | xi_a at t_j].
struct InfoFactor {
    Factor dist;
    double sigma = 1.0;
    double T = 1.0; // revelation date, beyond the last kernel date
};
struct InfoKernelSpec {
    std::vector<double> dates; // t_0 = 0 < ... < t_N
    std::vector<double> alpha, beta;
    std::vector<InfoFactor> factors;
    std::vector<int> observe; // kernel at date j reads information at date observe[j] <= j; empty = identity

    void validate() const;
};

class InfoKernel {
public:
    explicit InfoKernel(InfoKernelSpec spec);
    const InfoKernelSpec& spec() const { return spec_; }
    // E[X_a | xi_a = x at date i]
    double factor_mean(std::size_t a, int i, double x) const;
    double kernel(int j, const std::vector<double>& xi_at_observe) const;
    // E_i[pi_j] given the information path: path[d][a] for dates d <= i.
    double expect(int i, int j, const std::vector<std::vector<double>>& path) const;
    // Checks E_i[pi_j] < pi_i on a grid of information values; returns the largest E_i[pi_j] / pi_i.
    double supermartingale_ratio(int grid_points = 21) const;

private:
    InfoKernelSpec spec_;
};

// Log-separable utility U = A ln(consumption) + B ln(liquidity benefit).
struct InflationSpec {
    double A = 1.0, B = 1.0, gamma = 0.05, mu = 1.0;
    std::vector<double> dates;
    NodeField k, M, lambda;
};
struct InflationModel {
    KernelModel nominal;
    NodeField price_level; // C
    NodeField real_kernel; // A e^{-gamma t} / (mu k)
    double velocity_error = 0.0;
    double budget = 0.0; // E[sum pi_n (C_n k_n + lambda_n M_n)]
};
InflationModel inflation_model(const InflationSpec& spec, const Lattice& lattice);
// Value at date 0 of a nominal claim H paid at date j.
double claim_value(const KernelModel& nominal, int j, const std::vector<double>& H);
// Index-linked bond paying C_j: (nominal-kernel value, real-kernel value times C_0).
std::pair<double, double> index_linked_value(const InflationModel& m, int j);

} // namespace infoflow
