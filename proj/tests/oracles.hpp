#pragma once

// Reference computations for the tests. They use other algorithms than the
// library on purpose: Bayes from the Gaussian likelihood density in long
// double, double-exponential quadrature instead of Gauss-Kronrod, and
// std::mt19937_64 instead of the counter streams.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

// P(H = h_i | xi_t = xi) with xi_t | H = h ~ N(sigma h t, t (T - t) / T).
inline std::vector<double> bayes(const std::vector<double>& h, const std::vector<double>& p, double sigma, double T,
                                 double t, double xi) {
    std::vector<long double> lw(h.size());
    if (t == 0.0) return p;
    const long double v = (long double)t * (T - t) / T;
    long double m = -INFINITY;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const long double d = xi - (long double)sigma * h[i] * t;
        lw[i] = p[i] > 0 ? std::log((long double)p[i]) - d * d / (2 * v) : -INFINITY;
        m = std::max(m, lw[i]);
    }
    long double z = 0;
    for (auto& w : lw) z += (w = std::exp(w - m));
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = static_cast<double>(lw[i] / z);
    return out;
}

inline double mean_given(const std::vector<double>& h, const std::vector<double>& p, double sigma, double T, double t,
                         double xi) {
    const auto q = bayes(h, p, sigma, T, t, xi);
    long double s = 0;
    for (std::size_t i = 0; i < h.size(); ++i) s += (long double)q[i] * h[i];
    return static_cast<double>(s);
}

inline double Phi(double x) { return 0.5 * boost::math::erfc(-x / std::sqrt(2.0)); }
inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// integral over [a, b]
inline double quad(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    // Boost 1.74 tanh_sinh can evaluate exactly at a left limit with |a| >= 0.5
    // (then asserts); on [0, 1] it takes the small-limit path instead.
    boost::math::quadrature::tanh_sinh<double> ts(12);
    const double w = b - a;
    return w * ts.integrate([&](double u) { return f(a + w * u); }, 0.0, 1.0, tol);
}

// integral over [a, infinity)
inline double quad_inf(const std::function<double(double)>& f, double a, double tol = 1e-13) {
    boost::math::quadrature::exp_sinh<double> es(12);
    // the integrands used here all decay to zero, so the point at infinity adds nothing
    return es.integrate([&](double x) { return std::isfinite(a + x) ? f(a + x) : 0.0; }, 0.0, INFINITY, tol);
}

// Posterior mean of X with prior density `prior` on [0, inf) and likelihood
// exp(b x - A x^2 / 2), split at the peak of the integrand for accuracy.
inline double posterior_moment(const std::function<double(double)>& prior, double A, double b, int k, double peak,
                               double width) {
    auto lw = [&](double x) { return b * x - 0.5 * A * x * x; };
    const double shift = lw(std::max(peak, 0.0));
    auto w = [&](double x) { return x <= 0.0 ? 0.0 : prior(x) * std::exp(lw(x) - shift); };
    const double c = std::max(peak, 0.0);
    const double hi = c + 40.0 * width;
    auto num = [&](double x) {
        const double v = w(x);
        return v == 0.0 ? 0.0 : std::pow(x, k) * v;
    };
    const double zi = quad(w, 0.0, c > 0 ? c : width) + quad(w, c > 0 ? c : width, hi) + quad_inf(w, hi);
    const double ni = quad(num, 0.0, c > 0 ? c : width) + quad(num, c > 0 ? c : width, hi) + quad_inf(num, hi);
    return ni / zi;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

struct Stats {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    double se() const { return std::sqrt(m2 / (n - 1) / n); }
};

} // namespace oracle
