#include "infoflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace infoflow {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw Error(Errc::invalid_input, msg);
}

// Upper bound on sum|terms| / |sum| in the gamma F_k sums before falling back to
// quadrature. Cancellation loses about log10 of this ratio in significant digits.
constexpr double kCancelGuard = 1e6;

} // namespace

DiscretePayoff::DiscretePayoff(std::vector<double> levels, std::vector<double> probs)
    : h(std::move(levels)), p(std::move(probs)) {
    validate();
}

DiscretePayoff DiscretePayoff::binary(double h0, double h1, double p1) {
    return DiscretePayoff({h0, h1}, {1.0 - p1, p1});
}

double DiscretePayoff::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) m += h[i] * p[i];
    return m;
}

void DiscretePayoff::validate() const {
    require(!h.empty() && h.size() == p.size(), "payoff: levels and probabilities must match");
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        require(std::isfinite(h[i]), "payoff: levels must be finite");
        require(p[i] >= 0.0 && p[i] <= 1.0, "payoff: probabilities must lie in [0,1]");
        if (i > 0) require(h[i] > h[i - 1], "payoff: levels must be strictly increasing");
        s += p[i];
    }
    require(std::abs(s - 1.0) < 1e-12, "payoff: probabilities must sum to 1");
}

ContinuousDensity ContinuousDensity::exponential(double mean) {
    ContinuousDensity d;
    d.kind = DensityKind::exponential;
    d.delta = mean;
    d.validate();
    return d;
}

ContinuousDensity ContinuousDensity::gamma(double rate, int shape) {
    ContinuousDensity d;
    d.kind = DensityKind::gamma;
    d.delta = rate;
    d.n = shape;
    d.validate();
    return d;
}

ContinuousDensity ContinuousDensity::gaussian(double mean, double variance) {
    ContinuousDensity d;
    d.kind = DensityKind::gaussian;
    d.mu = mean;
    d.var = variance;
    d.validate();
    return d;
}

ContinuousDensity ContinuousDensity::tabulated(std::vector<double> grid, std::vector<double> weights) {
    ContinuousDensity d;
    d.kind = DensityKind::tabulated;
    require(grid.size() >= 2 && grid.size() == weights.size(), "tabulated density: need >= 2 matching points");
    double area = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        require(grid[i] > grid[i - 1], "tabulated density: grid must be increasing");
        area += 0.5 * (weights[i] + weights[i - 1]) * (grid[i] - grid[i - 1]);
    }
    require(area > 0.0, "tabulated density: zero mass");
    for (double& w : weights) {
        require(w >= 0.0, "tabulated density: negative weight");
        w /= area;
    }
    d.grid = std::move(grid);
    d.weights = std::move(weights);
    return d;
}

void ContinuousDensity::validate() const {
    switch (kind) {
    case DensityKind::exponential: require(delta > 0.0, "exponential density: delta must be positive"); break;
    case DensityKind::gamma:
        require(delta > 0.0, "gamma density: rate must be positive");
        require(n >= 1, "gamma density: shape must be a positive integer");
        break;
    case DensityKind::gaussian: require(var > 0.0, "gaussian density: variance must be positive"); break;
    case DensityKind::tabulated: require(grid.size() >= 2, "tabulated density: empty grid"); break;
    }
}

double ContinuousDensity::pdf(double x) const {
    switch (kind) {
    case DensityKind::exponential: return x < 0.0 ? 0.0 : std::exp(-x / delta) / delta;
    case DensityKind::gamma:
        if (x < 0.0) return 0.0;
        return std::exp(n * std::log(delta) + (n - 1) * std::log(x) - delta * x - std::lgamma(n));
    case DensityKind::gaussian: return norm_pdf((x - mu) / std::sqrt(var)) / std::sqrt(var);
    case DensityKind::tabulated: {
        if (x < grid.front() || x > grid.back()) return 0.0;
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        std::size_t j = std::min<std::size_t>(it - grid.begin(), grid.size() - 1);
        std::size_t i = j - 1;
        const double w = (x - grid[i]) / (grid[j] - grid[i]);
        return weights[i] + w * (weights[j] - weights[i]);
    }
    }
    return 0.0;
}

double ContinuousDensity::lo() const {
    switch (kind) {
    case DensityKind::gaussian: return -INFINITY;
    case DensityKind::tabulated: return grid.front();
    default: return 0.0;
    }
}

double ContinuousDensity::hi() const { return kind == DensityKind::tabulated ? grid.back() : INFINITY; }

double ContinuousDensity::mean() const {
    switch (kind) {
    case DensityKind::exponential: return delta;
    case DensityKind::gamma: return n / delta;
    case DensityKind::gaussian: return mu;
    case DensityKind::tabulated: {
        double m = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double a = grid[i - 1], b = grid[i], wa = weights[i - 1], wb = weights[i];
            // integral of x * linear pdf over the cell
            m += (b - a) * (wa * (2 * a + b) + wb * (a + 2 * b)) / 6.0;
        }
        return m;
    }
    }
    return 0.0;
}

double ContinuousDensity::variance() const {
    switch (kind) {
    case DensityKind::exponential: return delta * delta;
    case DensityKind::gamma: return n / (delta * delta);
    case DensityKind::gaussian: return var;
    case DensityKind::tabulated: {
        const double m = mean();
        return integrate([&](double x) { return (x - m) * (x - m) * pdf(x); }, grid.front(), grid.back(), 1e-12);
    }
    }
    return 0.0;
}

double ContinuousDensity::sample(Stream& s) const {
    switch (kind) {
    case DensityKind::exponential: return -delta * std::log(s.uniform());
    case DensityKind::gamma: {
        double x = 0.0;
        for (int i = 0; i < n; ++i) x -= std::log(s.uniform());
        return x / delta;
    }
    case DensityKind::gaussian: return mu + std::sqrt(var) * s.normal();
    case DensityKind::tabulated: {
        // inverse CDF of the piecewise-linear density
        double u = s.uniform(), acc = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double a = grid[i - 1], w = grid[i] - a, fa = weights[i - 1], fb = weights[i];
            const double mass = 0.5 * (fa + fb) * w;
            if (u <= acc + mass || i + 1 == grid.size()) {
                const double r = std::min(u - acc, mass);
                const double slope = (fb - fa) / w;
                if (std::abs(slope) < 1e-14 * std::max(fa, 1.0)) return a + (fa > 0 ? r / fa : 0.0);
                const double y = (-fa + std::sqrt(std::max(0.0, fa * fa + 2.0 * slope * r))) / slope;
                return a + std::clamp(y, 0.0, w);
            }
            acc += mass;
        }
        return grid.back();
    }
    }
    return 0.0;
}

double factor_mean(const Factor& f) {
    if (auto d = std::get_if<DiscretePayoff>(&f)) return d->mean();
    return std::get<ContinuousDensity>(f).mean();
}

double sample_factor(const Factor& f, Stream& s) {
    if (auto d = std::get_if<DiscretePayoff>(&f)) {
        const double u = s.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < d->size(); ++i) {
            acc += d->p[i];
            if (u < acc) return d->h[i];
        }
        for (std::size_t i = d->size(); i-- > 0;)
            if (d->p[i] > 0.0) return d->h[i];
    }
    return std::get<ContinuousDensity>(f).sample(s);
}

void InfoSpec::validate() const {
    require(T > 0.0 && std::isfinite(T), "information process: horizon must be positive");
    require(sigma >= 0.0 && std::isfinite(sigma), "information process: sigma must be >= 0");
}

TimeGrid TimeGrid::uniform(double T, std::size_t steps) {
    require(steps >= 1, "time grid: need at least one step");
    TimeGrid g;
    g.T = T;
    g.t.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) g.t[i] = T * static_cast<double>(i) / static_cast<double>(steps);
    g.t.back() = T;
    return g;
}

void TimeGrid::validate() const {
    require(!t.empty(), "time grid: empty");
    require(T > 0.0, "time grid: horizon must be positive");
    require(t.front() == 0.0, "time grid: must start at 0");
    for (std::size_t i = 1; i < t.size(); ++i) require(t[i] > t[i - 1], "time grid: must be strictly increasing");
    require(t.back() <= T, "time grid: points beyond the horizon");
}

PathSample sample_brownian_bridge(const TimeGrid& grid, std::uint64_t seed, std::uint64_t path) {
    grid.validate();
    Stream s(seed, path, 1);
    const std::size_t m = grid.t.size();
    std::vector<double> B(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) B[i] = B[i - 1] + std::sqrt(grid.t[i] - grid.t[i - 1]) * s.normal();
    double BT = B.back();
    if (grid.t.back() < grid.T) BT += std::sqrt(grid.T - grid.t.back()) * s.normal();
    PathSample out;
    out.t = grid.t;
    out.v.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.v[i] = B[i] - (grid.t[i] / grid.T) * BT;
    out.v.front() = 0.0;
    if (grid.t.back() == grid.T) out.v.back() = 0.0;
    return out;
}

PathSample information_path_given(const InfoSpec& spec, double factor_value, const TimeGrid& grid,
                                  std::uint64_t seed, std::uint64_t path) {
    spec.validate();
    require(grid.T == spec.T, "information path: grid horizon differs from the process horizon");
    PathSample out = sample_brownian_bridge(grid, seed, path);
    for (std::size_t i = 0; i < out.t.size(); ++i) out.v[i] += spec.sigma * factor_value * out.t[i];
    out.factor = factor_value;
    return out;
}

PathSample sample_information_path(const InfoSpec& spec, const Factor& factor, const TimeGrid& grid,
                                   std::uint64_t seed, std::uint64_t path) {
    Stream s(seed, path, 2);
    return information_path_given(spec, sample_factor(factor, s), grid, seed, path);
}

std::vector<double> conditional_probs(const DiscretePayoff& payoff, const InfoSpec& spec, double t, double xi) {
    check_before_maturity(t, spec.T, "conditional_probs");
    const double k = spec.T / (spec.T - t);
    const std::size_t n = payoff.size();
    std::vector<double> lw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sh = spec.sigma * payoff.h[i];
        lw[i] = (payoff.p[i] > 0.0 ? std::log(payoff.p[i]) : -INFINITY) + k * (sh * xi - 0.5 * sh * sh * t);
    }
    const double lz = log_sum_exp(lw);
    if (!std::isfinite(lz)) throw Error(Errc::divergence, "conditional_probs: non-finite normaliser");
    for (double& w : lw) w = std::exp(w - lz);
    return lw;
}

std::vector<double> fk_table(double x, int kmax) {
    std::vector<double> F(std::max(kmax, 1) + 1);
    const double g = std::exp(-0.5 * x * x);
    F[0] = std::sqrt(2.0 * M_PI) * norm_cdf(-x);
    F[1] = g;
    for (int k = 0; k + 2 <= kmax; ++k) F[k + 2] = (k + 1) * F[k] + std::pow(x, k + 1) * g;
    F.resize(kmax + 1);
    return F;
}

Posterior::Posterior(const ContinuousDensity& prior, const InfoSpec& spec, double t, double xi, Method method)
    : prior_(prior) {
    prior_.validate();
    spec.validate();
    check_before_maturity(t, spec.T, "conditional_density");
    const double k = spec.T / (spec.T - t);
    A_ = spec.sigma * spec.sigma * t * k;
    b_ = spec.sigma * xi * k;
    quad_ = method == Method::quadrature || prior_.kind == DensityKind::tabulated;

    if (prior_.kind == DensityKind::gaussian) {
        const double prec = 1.0 / prior_.var + A_;
        mean_ = (prior_.mu / prior_.var + b_) / prec;
        var_ = 1.0 / prec;
        mode_ = mean_;
    } else if (prior_.gamma_family()) {
        const int n = prior_.shape();
        const double B = b_ - prior_.rate();
        if (A_ <= 0.0 && B >= 0.0) throw Error(Errc::divergence, "conditional_density: posterior not integrable");
        if (A_ > 0.0)
            mode_ = n == 1 ? std::max(B / A_, 0.0) : (B + std::sqrt(B * B + 4.0 * A_ * (n - 1))) / (2.0 * A_);
        else
            mode_ = (n - 1) / (-B);
    }
    find_range();

    if (!quad_ && prior_.gamma_family()) {
        std::vector<double> m;
        if (gamma_moments(2, m)) {
            mean_ = m[1];
            var_ = std::max(0.0, m[2] - m[1] * m[1]);
            const int n = prior_.shape();
            const double B = b_ - prior_.rate();
            if (A_ > 0.0) {
                const double c = B / std::sqrt(A_);
                const auto F = fk_table(-c, n - 1);
                double S = 0.0;
                for (int j = 0; j <= n - 1; ++j)
                    S += std::exp(std::lgamma(n) - std::lgamma(j + 1) - std::lgamma(n - j)) * std::pow(c, n - 1 - j) * F[j];
                logz_ = -logmax_ - 0.5 * n * std::log(A_) + 0.5 * c * c + std::log(S);
            } else {
                logz_ = -logmax_ + std::lgamma(n) - n * std::log(-B);
            }
            // second central moment by the direct sum can still cancel; check against quadrature scale
            if (!(var_ > 0.0) || !std::isfinite(logz_)) quad_ = true;
        } else {
            quad_ = true;
        }
    }
    if (quad_) {
        const double z = quad_moment(0);
        if (!(z > 0.0) || !std::isfinite(z)) throw Error(Errc::divergence, "conditional_density: zero posterior mass");
        logz_ = std::log(z);
        mean_ = quad_moment(1) / z;
        const double m = mean_;
        var_ = expect([m](double x) { return (x - m) * (x - m); });
    }
}

double Posterior::log_unnorm(double x) const {
    const double ll = b_ * x - 0.5 * A_ * x * x;
    switch (prior_.kind) {
    case DensityKind::gaussian: {
        const double d = x - prior_.mu;
        return -0.5 * d * d / prior_.var + ll;
    }
    case DensityKind::exponential:
    case DensityKind::gamma: {
        if (x < 0.0) return -INFINITY;
        const int n = prior_.shape();
        const double lp = n == 1 ? 0.0 : (x > 0.0 ? (n - 1) * std::log(x) : -INFINITY);
        return lp - prior_.rate() * x + ll;
    }
    case DensityKind::tabulated: {
        const double p = prior_.pdf(x);
        return p > 0.0 ? std::log(p) + ll : -INFINITY;
    }
    }
    return -INFINITY;
}

void Posterior::find_range() {
    if (prior_.kind == DensityKind::tabulated) {
        // crude mode search over the grid and cell midpoints
        double best = -INFINITY;
        const auto& g = prior_.grid;
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (double x : {g[i], i + 1 < g.size() ? 0.5 * (g[i] + g[i + 1]) : g[i]}) {
                const double v = log_unnorm(x);
                if (v > best) best = v, mode_ = x;
            }
        }
        // the likelihood vertex can fall inside a cell
        if (A_ > 0.0) {
            const double v = b_ / A_;
            if (v > g.front() && v < g.back() && log_unnorm(v) > best) best = log_unnorm(v), mode_ = v;
        }
        logmax_ = best;
        lo_ = g.front();
        hi_ = g.back();
        return;
    }
    logmax_ = log_unnorm(mode_);
    double curv = A_;
    if (prior_.kind == DensityKind::gaussian) curv += 1.0 / prior_.var;
    if (prior_.gamma_family() && prior_.shape() > 1 && mode_ > 0.0) curv += (prior_.shape() - 1) / (mode_ * mode_);
    double s = curv > 0.0 ? 1.0 / std::sqrt(curv) : prior_.shape() / std::abs(b_ - prior_.rate());
    if (!(s > 0.0) || !std::isfinite(s)) s = std::max(1.0, std::abs(mode_));
    // Walk out until the log density drops 72 below the peak, the Gaussian
    // equivalent of mode +- 12 standard deviations.
    const double drop = logmax_ - 72.0;
    double step = s;
    hi_ = mode_ + step;
    for (int i = 0; i < 200 && log_unnorm(hi_) > drop; ++i) step *= 2.0, hi_ = mode_ + step;
    step = s;
    lo_ = mode_ - step;
    for (int i = 0; i < 200 && lo_ > prior_.lo() && log_unnorm(lo_) > drop; ++i) step *= 2.0, lo_ = mode_ - step;
    lo_ = std::max(lo_, prior_.lo());
    hi_ = std::min(hi_, prior_.hi());
}

bool Posterior::gamma_moments(int kmax, std::vector<double>& out) const {
    const int n = prior_.shape();
    const double B = b_ - prior_.rate();
    out.assign(kmax + 1, 1.0);
    if (A_ <= 0.0) {
        const double r = -B;
        for (int k = 1; k <= kmax; ++k) out[k] = out[k - 1] * (n + k - 1) / r;
        return true;
    }
    const double sa = std::sqrt(A_);
    const double c = B / sa;
    const int m0 = n - 1;
    const auto F = fk_table(-c, m0 + kmax);
    std::vector<double> S(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        const int m = m0 + k;
        double sum = 0.0, mag = 0.0;
        for (int j = 0; j <= m; ++j) {
            const double term = std::exp(std::lgamma(m + 1) - std::lgamma(j + 1) - std::lgamma(m - j + 1)) *
                                std::pow(c, m - j) * F[j];
            sum += term;
            mag += std::abs(term);
        }
        if (!(sum > 0.0) || !std::isfinite(sum) || mag > kCancelGuard * sum) return false;
        S[k] = sum;
    }
    for (int k = 1; k <= kmax; ++k) out[k] = std::pow(sa, -k) * S[k] / S[0];
    return true;
}

std::vector<double> Posterior::breakpoints() const {
    // points around the mode at x4 spacing keep the adaptive rule honest; the
    // first spacing comes from the narrower side unless the mode sits on the edge
    std::vector<double> pts{lo_, hi_};
    const double left = mode_ - lo_, right = hi_ - mode_;
    double s = std::min(left, right);
    if (!(s > 0.0)) s = std::max(left, right);
    s = std::max(s / 64.0, (hi_ - lo_) * 1e-6);
    if (mode_ > lo_ && mode_ < hi_) pts.push_back(mode_);
    for (double d = s; d < hi_ - lo_; d *= 4.0) {
        if (mode_ + d < hi_) pts.push_back(mode_ + d);
        if (mode_ - d > lo_) pts.push_back(mode_ - d);
    }
    if (prior_.kind == DensityKind::tabulated)
        for (double g : prior_.grid) pts.push_back(g);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double Posterior::expect(const std::function<double(double)>& f, double rel_tol) const {
    const auto pts = breakpoints();
    const double shift = logmax_ + (quad_ || prior_.kind != DensityKind::gaussian ? logz_ : 0.0);
    auto g = [&](double x) {
        if (prior_.kind == DensityKind::gaussian && !quad_) return f(x) * pdf(x);
        const double l = log_unnorm(x);
        return std::isfinite(l) ? f(x) * std::exp(l - shift) : 0.0;
    };
    return integrate_pieces(g, pts, rel_tol);
}

double Posterior::quad_moment(int k) const {
    // integral of x^k exp(log_unnorm - logmax); logz_ is still zero when this runs
    const auto pts = breakpoints();
    auto g = [&](double x) {
        const double l = log_unnorm(x);
        return std::isfinite(l) ? std::pow(x, k) * std::exp(l - logmax_) : 0.0;
    };
    return integrate_pieces(g, pts, 1e-13);
}

double Posterior::pdf(double x) const {
    if (prior_.kind == DensityKind::gaussian && !quad_) return norm_pdf((x - mean_) / std::sqrt(var_)) / std::sqrt(var_);
    const double l = log_unnorm(x);
    return std::isfinite(l) ? std::exp(l - logmax_ - logz_) : 0.0;
}

double Posterior::moment(int k) const {
    if (k == 0) return 1.0;
    if (k == 1) return mean_;
    if (!quad_) {
        if (prior_.kind == DensityKind::gaussian) {
            double m2 = 1.0, m1 = mean_;
            for (int j = 2; j <= k; ++j) {
                const double m = mean_ * m1 + (j - 1) * var_ * m2;
                m2 = m1;
                m1 = m;
            }
            return m1;
        }
        std::vector<double> m;
        if (gamma_moments(k, m)) return m[k];
    }
    return expect([k](double x) { return std::pow(x, k); });
}

double Posterior::central3() const {
    if (prior_.kind == DensityKind::gaussian && !quad_) return 0.0;
    const double m = mean_;
    return expect([m](double x) { return (x - m) * (x - m) * (x - m); });
}

Posterior conditional_density(const ContinuousDensity& prior, const InfoSpec& spec, double t, double xi) {
    return Posterior(prior, spec, t, xi);
}

PathSample innovations_path(const InfoSpec& spec, const PathSample& xi_path, const DiscretePayoff& payoff) {
    require(!xi_path.t.empty() && xi_path.t.size() == xi_path.v.size(), "innovations: malformed path");
    const double T = spec.T;
    PathSample w;
    w.t = xi_path.t;
    w.v.resize(xi_path.t.size());
    w.factor = xi_path.factor;
    double i1 = 0.0, i2 = 0.0;
    double prev1 = 0.0, prev2 = 0.0;
    for (std::size_t k = 0; k < xi_path.t.size(); ++k) {
        const double s = xi_path.t[k];
        check_before_maturity(s, T, "innovations_path");
        const auto pi = conditional_probs(payoff, spec, s, xi_path.v[k]);
        double H = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i) H += payoff.h[i] * pi[i];
        const double f1 = xi_path.v[k] / (T - s), f2 = H / (T - s);
        if (k > 0) {
            const double ds = s - xi_path.t[k - 1];
            i1 += 0.5 * (prev1 + f1) * ds;
            i2 += 0.5 * (prev2 + f2) * ds;
        }
        prev1 = f1;
        prev2 = f2;
        w.v[k] = xi_path.v[k] + i1 - spec.sigma * T * i2;
    }
    return w;
}

} // namespace infoflow
