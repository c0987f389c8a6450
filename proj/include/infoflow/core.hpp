#pragma once

#include "infoflow/common.hpp"
#include "infoflow/rng.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace infoflow {

struct DiscretePayoff {
    std::vector<double> h; // strictly increasing levels
    std::vector<double> p; // a-priori probabilities

    DiscretePayoff() = default;
    DiscretePayoff(std::vector<double> levels, std::vector<double> probs);
    static DiscretePayoff binary(double h0, double h1, double p1);

    std::size_t size() const { return h.size(); }
    double mean() const;
    void validate() const;
};

enum class DensityKind { exponential, gamma, gaussian, tabulated };

// A-priori density of a continuous factor. exponential(delta) has mean delta;
// gamma(delta, n) has rate delta and integer shape n, so gamma(delta, 1) is
// exponential(1/delta).
struct ContinuousDensity {
    DensityKind kind = DensityKind::exponential;
    double delta = 1.0;
    int n = 1;
    double mu = 0.0, var = 1.0;
    std::vector<double> grid, weights; // tabulated: piecewise-linear pdf

    static ContinuousDensity exponential(double mean);
    static ContinuousDensity gamma(double rate, int shape);
    static ContinuousDensity gaussian(double mean, double variance);
    static ContinuousDensity tabulated(std::vector<double> grid, std::vector<double> weights);

    double pdf(double x) const;
    double lo() const; // support
    double hi() const;
    double mean() const;
    double variance() const;
    double sample(Stream& s) const;
    void validate() const;

    // Gamma-family view: exponential and gamma both have density prop. to
    // x^(shape-1) exp(-rate x).
    bool gamma_family() const { return kind == DensityKind::exponential || kind == DensityKind::gamma; }
    int shape() const { return kind == DensityKind::gamma ? n : 1; }
    double rate() const { return kind == DensityKind::gamma ? delta : 1.0 / delta; }
};

using Factor = std::variant<DiscretePayoff, ContinuousDensity>;

double factor_mean(const Factor& f);
double sample_factor(const Factor& f, Stream& s);

struct InfoSpec {
    double sigma = 1.0; // information flow rate
    double T = 1.0;     // horizon, years
    void validate() const;
};

struct TimeGrid {
    std::vector<double> t;
    double T = 1.0;

    static TimeGrid uniform(double T, std::size_t steps);
    // 0 = t_0 < ... < t_m <= T
    void validate() const;
};

struct PathSample {
    std::vector<double> t;
    std::vector<double> v;
    double factor = 0.0; // drawn factor value, when the path carries one
};

PathSample sample_brownian_bridge(const TimeGrid& grid, std::uint64_t seed, std::uint64_t path = 0);
PathSample sample_information_path(const InfoSpec& spec, const Factor& factor, const TimeGrid& grid,
                                   std::uint64_t seed, std::uint64_t path = 0);
// Same bridge stream as sample_information_path, but with the factor value fixed.
PathSample information_path_given(const InfoSpec& spec, double factor_value, const TimeGrid& grid,
                                  std::uint64_t seed, std::uint64_t path = 0);

// pi_it for each level, in log space.
std::vector<double> conditional_probs(const DiscretePayoff& payoff, const InfoSpec& spec, double t, double xi);

// Posterior of a continuous factor given xi_t. Moments come from closed forms
// where available (Gaussian conjugacy, gamma-family F_k sums) and from adaptive
// quadrature otherwise.
class Posterior {
public:
    enum class Method { automatic, quadrature };

    Posterior(const ContinuousDensity& prior, const InfoSpec& spec, double t, double xi,
              Method method = Method::automatic);

    double mean() const { return mean_; }
    double variance() const { return var_; }
    double central3() const;
    double moment(int k) const; // raw moment E_t[X^k]
    double pdf(double x) const;
    bool closed_form() const { return !quad_; }

    // Log-likelihood coefficients: exp(b x - A x^2 / 2).
    double A() const { return A_; }
    double b() const { return b_; }
    const ContinuousDensity& prior() const { return prior_; }
    // Integration range holding all but a negligible part of the posterior mass.
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mode() const { return mode_; }

    // E_t[f(X)] by quadrature over the posterior.
    double expect(const std::function<double(double)>& f, double rel_tol = 1e-12) const;

private:
    double log_unnorm(double x) const;
    bool gamma_moments(int kmax, std::vector<double>& out) const;
    double quad_moment(int k) const;
    std::vector<double> breakpoints() const;
    void find_range();

    ContinuousDensity prior_;
    double A_ = 0.0, b_ = 0.0;
    bool quad_ = false;
    double mode_ = 0.0, logmax_ = 0.0, lo_ = 0.0, hi_ = 0.0;
    double logz_ = 0.0; // log of integral of exp(log_unnorm - logmax)
    double mean_ = 0.0, var_ = 0.0;
};

Posterior conditional_density(const ContinuousDensity& prior, const InfoSpec& spec, double t, double xi);

// F_k(x) = integral from x to infinity of z^k exp(-z^2/2), k = 0..kmax, by upward recursion.
std::vector<double> fk_table(double x, int kmax);

// W_t = xi_t + int xi_s/(T-s) ds - sigma T int H_s/(T-s) ds, trapezoid rule on the path grid.
PathSample innovations_path(const InfoSpec& spec, const PathSample& xi_path, const DiscretePayoff& payoff);

} // namespace infoflow
