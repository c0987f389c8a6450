#include "infoflow/common.hpp"
#include "infoflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace infoflow {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::maturity_singularity: return "maturity-singularity";
    case Errc::divergence: return "divergence";
    case Errc::no_solution: return "no-solution";
    case Errc::degenerate: return "degenerate-distribution";
    case Errc::greeks_undefined: return "greeks-undefined";
    case Errc::unsupported: return "unsupported";
    }
    return "unknown";
}

void check_before_maturity(double t, double T, const char* where) {
    if (!(T > 0.0)) throw Error(Errc::invalid_input, std::string(where) + ": horizon must be positive");
    if (!(t >= 0.0)) throw Error(Errc::invalid_input, std::string(where) + ": time must be >= 0");
    if (t >= T - kMaturityEps * T)
        throw Error(Errc::maturity_singularity, std::string(where) + ": t too close to maturity");
}

double norm_pdf(double x) {
    static const double c = 1.0 / std::sqrt(2.0 * M_PI);
    return c * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double inv_mills(double z) {
    if (z > -30.0) return norm_pdf(z) / norm_cdf(z);
    // Continued fraction for N(-x)/phi(x) at x = -z, evaluated with Lentz's method.
    const double x = -z;
    const double tiny = 1e-300;
    double f = x, c = x, d = 0.0;
    for (int k = 1; k < 500; ++k) {
        d = x + k * d;
        d = (std::abs(d) < tiny) ? tiny : d;
        c = x + k / c;
        c = (std::abs(c) < tiny) ? tiny : c;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return f;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    // Boost compares the error on its reference interval [-1, 1] with a tolerance
    // scaled by the true width, which never converges on very short intervals.
    // Mapping onto [-1, 1] here keeps both on the same scale.
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double u) { return half * f(mid + half * u); };
    double err = 0.0, l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -1.0, 1.0, 18, rel_tol, &err, &l1);
    if (!std::isfinite(v)) throw Error(Errc::divergence, "quadrature produced a non-finite value");
    return v;
}

double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& pts, double rel_tol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const std::size_t m = pts.size() < 2 ? 0 : pts.size() - 1;
    std::vector<double> rough(m), l1(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double err = 0.0;
        const double mid = 0.5 * (pts[i] + pts[i + 1]), half = 0.5 * (pts[i + 1] - pts[i]);
        rough[i] = GK::integrate([&](double u) { return half * f(mid + half * u); }, -1.0, 1.0, 0, 0.0, &err, &l1[i]);
        total += l1[i];
    }
    if (!std::isfinite(total)) throw Error(Errc::divergence, "quadrature produced a non-finite value");
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (l1[i] == 0.0 || l1[i] < 1e-3 * rel_tol * total) {
            s += rough[i];
            continue;
        }
        // absolute target rel_tol * total, shared out over the pieces
        const double tol = std::max(rel_tol, rel_tol * total / (l1[i] * static_cast<double>(m)));
        s += integrate(f, pts[i], pts[i + 1], std::min(tol, 1e-3));
    }
    return s;
}

double log_sum_exp(const std::vector<double>& v) {
    double m = -INFINITY;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

unsigned worker_count() {
    if (const char* env = std::getenv("INFOFLOW_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t w = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    const std::size_t block = (n + w - 1) / w;
    std::size_t slot = 0;
    for (std::size_t b = 0; b < n; b += block, ++slot) {
        pool.emplace_back([&fn, &errors, slot, b, e = std::min(n, b + block)] {
            try {
                fn(b, e);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Stream::Stream(std::uint64_t seed, std::uint64_t path, std::uint64_t sub)
    : key_(mix(mix(seed) ^ mix(path + 0x632be59bd9b4e019ULL) ^ mix(sub * 0xd6e8feb86659fd93ULL + 1))) {}

} // namespace infoflow
