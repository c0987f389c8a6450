#pragma once

#include "infoflow/credit.hpp"

#include <functional>

namespace infoflow {

// Discounted density of xi_t: A_0t(x) = P_0t * (density of xi_t at x).
class ADensity {
public:
    ADensity(const InfoSpec& spec, Factor factor, const DiscountCurve& curve, double t);

    double operator()(double x) const { return P0t_ * undiscounted(x); }
    double undiscounted(double x) const;
    double t() const { return t_; }
    double discount() const { return P0t_; }
    const InfoSpec& spec() const { return spec_; }
    const Factor& factor() const { return factor_; }
    // Range outside which the density is below any tolerance of interest.
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    // Integral of g against A_0t.
    double integrate(const std::function<double(double)>& g, double rel_tol = 1e-9) const;

private:
    InfoSpec spec_;
    Factor factor_;
    double t_, P0t_, var_;
    double zlo_ = 0.0, zhi_ = 0.0; // prior range for continuous factors
    double lo_, hi_;
};

ADensity ad_density(const InfoSpec& spec, const Factor& factor, const DiscountCurve& curve, double t);

double price_info_derivative(const ADensity& ad, const std::function<double(double)>& g, double rel_tol = 1e-9);

// Call on the single-dividend asset paying X ~ prior at spec.T, priced through
// the critical information value and the two AD integrals.
double price_continuous_call_via_ad(const ContinuousDensity& prior, const InfoSpec& spec, const DiscountCurve& curve,
                                    double K, double t);

// Undiscounted joint density of (xi_t1, xi_t2) for a discrete factor.
class BivariateAD {
public:
    BivariateAD(const InfoSpec& spec, DiscretePayoff payoff, double t1, double t2);
    double operator()(double x1, double x2) const;
    // Conditional law of xi_t1 given xi_t2 = x2: mean t1 x2 / t2, variance t1 (t2 - t1) / t2.
    double conditional_mean(double x2) const { return t1_ * x2 / t2_; }
    double conditional_variance() const { return t1_ * (t2_ - t1_) / t2_; }

private:
    InfoSpec spec_;
    DiscretePayoff payoff_;
    double t1_, t2_;
};

BivariateAD bivariate_ad_density(const InfoSpec& spec, const DiscretePayoff& payoff, double t1, double t2);

// Support range [lo, hi] of a prior holding all but a negligible tail.
std::pair<double, double> prior_range(const ContinuousDensity& d);

} // namespace infoflow
