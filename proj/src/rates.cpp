#include "infoflow/rates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace infoflow {

namespace {

void check_dates(const std::vector<double>& d, int N, const char* who) {
    if (static_cast<int>(d.size()) != N + 1) throw Error(Errc::invalid_input, std::string(who) + ": need N+1 dates");
    if (d.front() != 0.0) throw Error(Errc::invalid_input, std::string(who) + ": dates must start at 0");
    for (std::size_t i = 1; i < d.size(); ++i)
        if (!(d[i] > d[i - 1])) throw Error(Errc::invalid_input, std::string(who) + ": dates must increase");
}

void check_field(const Lattice& L, const NodeField& f, const char* who) {
    if (static_cast<int>(f.size()) != L.depth() + 1)
        throw Error(Errc::invalid_input, std::string(who) + ": field has the wrong number of dates");
    for (int i = 0; i <= L.depth(); ++i)
        if (f[i].size() != L.size(i)) throw Error(Errc::invalid_input, std::string(who) + ": field has the wrong shape");
}

void check_decreasing_positive(const std::vector<double>& v, const char* who) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0)) throw Error(Errc::invalid_input, std::string(who) + " must be positive");
        if (i > 0 && !(v[i] < v[i - 1])) throw Error(Errc::invalid_input, std::string(who) + " must strictly decrease");
    }
}

} // namespace

void KernelModel::validate() const {
    const int N = lattice.depth();
    check_dates(dates, N, "kernel");
    check_field(lattice, pi, "kernel");
    for (int i = 0; i <= N; ++i)
        for (double v : pi[i])
            if (!(v > 0.0)) throw Error(Errc::invalid_input, "kernel: must be strictly positive");
    for (int i = 0; i < N; ++i) {
        const auto e = lattice.expect_next(pi[i + 1], i);
        for (std::size_t k = 0; k < e.size(); ++k)
            if (!(e[k] < pi[i][k]))
                throw Error(Errc::invalid_input, "kernel: not a strict supermartingale at date " + std::to_string(i));
    }
}

std::vector<double> bond_price(const KernelModel& m, int i, int j) {
    if (i < 0 || j < i || j > m.horizon()) throw Error(Errc::invalid_input, "bond price: need 0 <= i <= j <= horizon");
    auto e = m.lattice.conditional(m.pi[j], i, j);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] /= m.pi[i][k];
    return e;
}

std::vector<std::vector<std::vector<double>>> bond_price_matrix(const KernelModel& m) {
    const int N = m.horizon();
    std::vector<std::vector<std::vector<double>>> P(N + 1);
    for (int i = 0; i <= N; ++i) P[i].resize(N - i + 1);
    for (int j = 0; j <= N; ++j) {
        std::vector<double> f = m.pi[j];
        for (int d = j; d >= 0; --d) {
            auto& out = P[d][j - d];
            out.resize(f.size());
            for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k] / m.pi[d][k];
            if (d > 0) f = m.lattice.expect_next(f, d - 1);
        }
    }
    return P;
}

void RationalSpec::validate() const {
    const int N = static_cast<int>(dates.size()) - 1;
    if (N < 1) throw Error(Errc::invalid_input, "rational model: need at least two dates");
    check_dates(dates, N, "rational model");
    if (static_cast<int>(alpha.size()) != N + 1 || static_cast<int>(beta.size()) != N + 1)
        throw Error(Errc::invalid_input, "rational model: alpha and beta need one entry per date");
    check_decreasing_positive(alpha, "rational model: alpha");
    check_decreasing_positive(beta, "rational model: beta");
    if (!(N0 > 0.0)) throw Error(Errc::invalid_input, "rational model: N0 must be positive");
    if (!(u > 1.0 && d > 0.0 && d < 1.0)) throw Error(Errc::invalid_input, "rational model: need u > 1 > d > 0");
}

double RationalSpec::N(int i, int ups) const { return N0 * std::pow(u, ups) * std::pow(d, i - ups); }

KernelModel build_rational(const RationalSpec& spec) {
    spec.validate();
    const int N = static_cast<int>(spec.dates.size()) - 1;
    KernelModel m{Lattice::binomial(N, spec.q()), spec.dates, {}};
    m.pi = m.lattice.field();
    for (int i = 0; i <= N; ++i)
        for (int k = 0; k <= i; ++k) m.pi[i][k] = spec.alpha[i] + spec.beta[i] * spec.N(i, k);
    m.validate();
    return m;
}

double rational_bond_price(const RationalSpec& spec, int i, int j, int ups) {
    const double n = spec.N(i, ups);
    return (spec.alpha[j] + spec.beta[j] * n) / (spec.alpha[i] + spec.beta[i] * n);
}

NodeField short_rates(const KernelModel& m) {
    const int N = m.horizon();
    NodeField r(N);
    for (int i = 0; i < N; ++i) {
        const auto e = m.lattice.expect_next(m.pi[i + 1], i);
        r[i].resize(e.size());
        for (std::size_t k = 0; k < e.size(); ++k) r[i][k] = m.pi[i][k] / e[k] - 1.0;
    }
    return r;
}

PathReport check_paths(const KernelModel& m, const std::optional<RationalSpec>& rational) {
    const int N = m.horizon();
    const Lattice& L = m.lattice;
    NodeField E(N), r(N);
    for (int i = 0; i < N; ++i) {
        E[i] = L.expect_next(m.pi[i + 1], i);
        r[i].resize(E[i].size());
        for (std::size_t k = 0; k < E[i].size(); ++k) r[i][k] = m.pi[i][k] / E[i][k] - 1.0;
    }
    PathReport rep;
    auto upd = [](double& slot, double v) { slot = std::max(slot, std::abs(v)); };

    struct State {
        double B, A, A2, Y, Bc, rc;
    };
    std::function<void(int, std::size_t, const State&)> visit = [&](int i, std::size_t k, const State& s) {
        const double pi = m.pi[i][k];
        upd(rep.doob_identity, pi - (s.Y - s.A));
        upd(rep.doob_short_rate, s.A - s.A2);
        if (rational) {
            upd(rep.account_closed_form, s.B - s.Bc);
            upd(rep.rho_closed_form, pi * s.B - s.rc);
        }
        if (i == N) {
            ++rep.paths;
            return;
        }
        const double Pnext = E[i][k] / pi;
        State c;
        c.B = s.B * (1.0 + r[i][k]);
        c.A = s.A + (pi - E[i][k]);
        c.A2 = s.A2 + pi * r[i][k] * Pnext;
        upd(rep.bond_vs_account, Pnext - s.B / c.B);
        if (!(c.B > s.B)) rep.account_increasing = false;
        if (!(c.A > s.A)) rep.doob_increasing = false;
        const auto ed = L.edges(i, k);
        double rho = 0.0, y = 0.0;
        for (std::size_t e = 0; e < ed.child.size(); ++e) {
            const double pc = m.pi[i + 1][ed.child[e]];
            rho += ed.prob[e] * pc * c.B;
            y += ed.prob[e] * (s.Y + pc - E[i][k]);
        }
        upd(rep.rho_martingale, rho - pi * s.B);
        upd(rep.doob_martingale, y - s.Y);
        double Ni = 0.0;
        if (rational) {
            const auto& R = *rational;
            Ni = R.N(i, L.ups(i, k));
            c.Bc = s.Bc * (R.alpha[i] + R.beta[i] * Ni) / (R.alpha[i + 1] + R.beta[i + 1] * Ni);
        }
        for (std::size_t e = 0; e < ed.child.size(); ++e) {
            const std::size_t ch = ed.child[e];
            State cc = c;
            cc.Y = s.Y + m.pi[i + 1][ch] - E[i][k];
            if (rational) {
                const auto& R = *rational;
                const double Nn = R.N(i + 1, L.ups(i + 1, ch));
                cc.rc = s.rc * (R.alpha[i + 1] + R.beta[i + 1] * Nn) / (R.alpha[i + 1] + R.beta[i + 1] * Ni);
            }
            visit(i + 1, ch, cc);
        }
    };
    const double pi0 = m.pi[0][0];
    visit(0, 0, State{1.0, 0.0, 0.0, pi0, 1.0, pi0});
    return rep;
}

std::vector<double> money_market_path(const KernelModel& m, std::uint64_t ups_path) {
    const auto r = short_rates(m);
    std::vector<double> B{1.0};
    std::size_t k = 0;
    for (int i = 0; i < m.horizon(); ++i) {
        B.push_back(B.back() * (1.0 + r[i][k]));
        const auto ed = m.lattice.edges(i, k);
        const std::size_t pick = ((ups_path >> i) & 1) ? ed.child.size() - 1 : 0;
        k = ed.child[pick];
    }
    return B;
}

FHRepresentation fh_representation(const KernelModel& m) {
    const int N = m.horizon();
    const Lattice& L = m.lattice;
    FHRepresentation fh;
    fh.m.resize(N + 2);
    for (int n = 1; n <= N + 1; ++n) {
        std::vector<double> g;
        if (n <= N) {
            const auto e = L.expect_next(m.pi[n], n - 1);
            g.resize(e.size());
            for (std::size_t k = 0; k < e.size(); ++k) g[k] = m.pi[n - 1][k] - e[k];
        } else {
            g = m.pi[N];
        }
        NodeField& f = fh.m[n];
        f.resize(n);
        f[n - 1] = g;
        for (int i = n - 2; i >= 0; --i) f[i] = L.expect_next(f[i + 1], i);
        for (const auto& row : f)
            for (double v : row)
                if (!(v > 0.0)) fh.positive = false;
        for (int i = 0; i + 1 < n; ++i) {
            const auto e = L.expect_next(f[i + 1], i);
            for (std::size_t k = 0; k < e.size(); ++k)
                fh.martingale_error = std::max(fh.martingale_error, std::abs(e[k] - f[i][k]));
        }
    }
    const auto P = bond_price_matrix(m);
    for (int i = 0; i <= N; ++i)
        for (int j = i; j <= N; ++j)
            for (std::size_t k = 0; k < L.size(i); ++k) {
                double num = 0.0, den = 0.0;
                for (int n = j + 1; n <= N + 1; ++n) num += fh.m[n][i][k];
                for (int n = i + 1; n <= N + 1; ++n) den += fh.m[n][i][k];
                fh.reconstruction_error = std::max(fh.reconstruction_error, std::abs(num / den - P[i][j - i][k]));
            }
    return fh;
}

namespace {

// rbar at every non-root node from a positive-return asset on a tree lattice.
NodeField returns_of(const Lattice& L, const NodeField& Bbar) {
    if (!L.is_tree()) throw Error(Errc::invalid_input, "positive-return asset: a tree lattice is required");
    check_field(L, Bbar, "positive-return asset");
    NodeField r = L.field();
    for (int i = 1; i <= L.depth(); ++i)
        for (std::size_t k = 0; k < L.size(i); ++k) {
            const double prev = Bbar[i - 1][L.parent(i, k)];
            if (!(Bbar[i][k] > prev))
                throw Error(Errc::invalid_input, "positive-return asset must strictly increase along every edge");
            r[i][k] = (Bbar[i][k] - prev) / prev;
        }
    return r;
}

} // namespace

ConstantValueReport constant_value_asset_check(const KernelModel& m, const NodeField& Bbar, double tol) {
    const Lattice& L = m.lattice;
    const int N = m.horizon();
    const NodeField r = returns_of(L, Bbar);
    ConstantValueReport rep;
    for (int j = 1; j <= N; ++j) {
        std::vector<double> W = m.pi[j], V(L.size(j), 0.0);
        for (int d = j - 1; d >= 0; --d) {
            std::vector<double> flow(L.size(d + 1));
            for (std::size_t k = 0; k < flow.size(); ++k) flow[k] = m.pi[d + 1][k] * r[d + 1][k] + V[k];
            V = L.expect_next(flow, d);
            W = L.expect_next(W, d);
            for (std::size_t k = 0; k < V.size(); ++k)
                rep.identity = std::max(rep.identity, std::abs(m.pi[d][k] - W[k] - V[k]));
        }
    }
    // G_i = sum_{n <= i} pi_n rbar_n along the unique path
    NodeField G = L.field();
    for (int i = 1; i <= N; ++i)
        for (std::size_t k = 0; k < L.size(i); ++k) G[i][k] = G[i - 1][L.parent(i, k)] + m.pi[i][k] * r[i][k];
    for (int i = 0; i <= N; ++i) {
        const auto EG = L.conditional(G[N], i, N);
        const auto Epi = L.conditional(m.pi[N], i, N);
        for (std::size_t k = 0; k < L.size(i); ++k)
            rep.decomposition = std::max(rep.decomposition, std::abs(m.pi[i][k] - (EG[k] - G[i][k] + Epi[k])));
    }
    rep.violation = rep.identity > tol || rep.decomposition > tol;
    return rep;
}

GKernel build_kernel_from_G(const Lattice& L, const std::vector<double>& dates, const NodeField& G, double tail) {
    if (!L.is_tree()) throw Error(Errc::invalid_input, "G kernel: a tree lattice is required");
    check_field(L, G, "G kernel");
    check_dates(dates, L.depth(), "G kernel");
    if (G[0][0] != 0.0) throw Error(Errc::invalid_input, "G kernel: G_0 must be 0");
    if (!(tail > 0.0)) throw Error(Errc::invalid_input, "G kernel: tail value must be positive");
    const int N = L.depth();
    for (int i = 1; i <= N; ++i)
        for (std::size_t k = 0; k < L.size(i); ++k)
            if (!(G[i][k] > G[i - 1][L.parent(i, k)]))
                throw Error(Errc::invalid_input, "G kernel: G must strictly increase along every edge");
    GKernel out{KernelModel{L, dates, L.field()}, L.field(), L.field(), 0.0};
    for (int i = 0; i <= N; ++i) {
        const auto EG = L.conditional(G[N], i, N);
        for (std::size_t k = 0; k < L.size(i); ++k) out.model.pi[i][k] = EG[k] - G[i][k] + tail;
    }
    out.Bbar[0][0] = 1.0;
    for (int i = 1; i <= N; ++i)
        for (std::size_t k = 0; k < L.size(i); ++k) {
            const std::size_t p = L.parent(i, k);
            out.rbar[i][k] = (G[i][k] - G[i - 1][p]) / out.model.pi[i][k];
            out.Bbar[i][k] = out.Bbar[i - 1][p] * (1.0 + out.rbar[i][k]);
        }
    for (int i = 0; i < N; ++i) {
        std::vector<double> rho(L.size(i + 1));
        for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = out.model.pi[i + 1][k] * out.Bbar[i + 1][k];
        const auto e = L.expect_next(rho, i);
        for (std::size_t k = 0; k < e.size(); ++k)
            out.rho_martingale = std::max(out.rho_martingale, std::abs(e[k] - out.model.pi[i][k] * out.Bbar[i][k]));
    }
    out.model.validate();
    return out;
}

OnePeriodExample positive_return_example(double B0, double B1, double S0, double U, double D, double Sbar0,
                                         double Dbar, double q_up) {
    if (!(B1 > B0 && B0 > 0.0)) throw Error(Errc::invalid_input, "example: need B1 > B0 > 0");
    if (!(U > S0 * B1 / B0 && S0 * B1 / B0 > D)) throw Error(Errc::invalid_input, "example: need U > S0 B1/B0 > D");
    OnePeriodExample ex;
    ex.p_star = (S0 * B1 / B0 - D) / (U - D);
    const double g = B1 / B0, ps = ex.p_star;
    if (!((g - ps) / (1.0 - ps) > Dbar / Sbar0 && Dbar / Sbar0 > 1.0))
        throw Error(Errc::invalid_input, "example: Dbar/Sbar0 outside the positive-return range");
    ex.Ubar = (Sbar0 * g - (1.0 - ps) * Dbar) / ps;
    ex.model.lattice = Lattice::one_period({1.0 - q_up, q_up});
    ex.model.dates = {0.0, 1.0};
    ex.model.pi = {{1.0}, {(1.0 - ps) / (g * (1.0 - q_up)), ps / (g * q_up)}};
    ex.Bbar = {{Sbar0}, {Dbar, ex.Ubar}};
    ex.model.validate();
    return ex;
}

void InfoKernelSpec::validate() const {
    const int N = static_cast<int>(dates.size()) - 1;
    if (N < 1) throw Error(Errc::invalid_input, "info kernel: need at least two dates");
    check_dates(dates, N, "info kernel");
    if (static_cast<int>(alpha.size()) != N + 1 || static_cast<int>(beta.size()) != N + 1)
        throw Error(Errc::invalid_input, "info kernel: alpha and beta need one entry per date");
    check_decreasing_positive(alpha, "info kernel: alpha");
    check_decreasing_positive(beta, "info kernel: beta");
    if (factors.empty()) throw Error(Errc::invalid_input, "info kernel: need at least one factor");
    for (const auto& f : factors) {
        if (!(f.T > dates.back())) throw Error(Errc::invalid_input, "info kernel: factors must be revealed after the last date");
        if (!(f.sigma >= 0.0)) throw Error(Errc::invalid_input, "info kernel: sigma must be >= 0");
        std::visit([](const auto& d) { d.validate(); }, f.dist);
        if (factor_mean(f.dist) < 0.0) throw Error(Errc::invalid_input, "info kernel: factors must have nonnegative values");
        if (auto d = std::get_if<DiscretePayoff>(&f.dist); d && d->h.front() < 0.0)
            throw Error(Errc::invalid_input, "info kernel: factors must have nonnegative values");
        if (auto c = std::get_if<ContinuousDensity>(&f.dist); c && c->lo() < 0.0)
            throw Error(Errc::invalid_input, "info kernel: factors must have nonnegative values");
    }
    if (!observe.empty()) {
        if (static_cast<int>(observe.size()) != N + 1)
            throw Error(Errc::invalid_input, "info kernel: observe needs one entry per date");
        for (int j = 0; j <= N; ++j)
            if (observe[j] < 0 || observe[j] > j)
                throw Error(Errc::invalid_input, "info kernel: kernel at date " + std::to_string(j) +
                                                     " reads information from a later date");
    }
}

InfoKernel::InfoKernel(InfoKernelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

double InfoKernel::factor_mean(std::size_t a, int i, double x) const {
    const auto& f = spec_.factors[a];
    const InfoSpec s{f.sigma, f.T};
    const double t = spec_.dates[i];
    if (auto d = std::get_if<DiscretePayoff>(&f.dist)) {
        const auto p = conditional_probs(*d, s, t, x);
        double m = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) m += p[k] * d->h[k];
        return m;
    }
    return Posterior(std::get<ContinuousDensity>(f.dist), s, t, x).mean();
}

double InfoKernel::kernel(int j, const std::vector<double>& xi) const {
    const int obs = spec_.observe.empty() ? j : spec_.observe[j];
    double prod = 1.0;
    for (std::size_t a = 0; a < spec_.factors.size(); ++a) prod *= factor_mean(a, obs, xi.at(a));
    return spec_.alpha[j] + spec_.beta[j] * prod;
}

double InfoKernel::expect(int i, int j, const std::vector<std::vector<double>>& path) const {
    const int N = static_cast<int>(spec_.dates.size()) - 1;
    if (i < 0 || j < 0 || i > N || j > N) throw Error(Errc::invalid_input, "info kernel: date out of range");
    if (static_cast<int>(path.size()) <= i) throw Error(Errc::invalid_input, "info kernel: path shorter than date i");
    const int obs = spec_.observe.empty() ? j : spec_.observe[j];
    if (obs <= i) return kernel(j, path[obs]);
    // tower property: E_i[E_obs[X]] = E_i[X], factors independent
    double prod = 1.0;
    for (std::size_t a = 0; a < spec_.factors.size(); ++a) prod *= factor_mean(a, i, path[i].at(a));
    return spec_.alpha[j] + spec_.beta[j] * prod;
}

double InfoKernel::supermartingale_ratio(int grid_points) const {
    const int N = static_cast<int>(spec_.dates.size()) - 1;
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = spec_.dates[i];
        for (int g = 0; g < grid_points; ++g) {
            const double z = grid_points > 1 ? -4.0 + 8.0 * g / (grid_points - 1) : 0.0;
            std::vector<double> xi;
            for (const auto& f : spec_.factors)
                xi.push_back(f.sigma * t * infoflow::factor_mean(f.dist) + z * std::sqrt(t * (f.T - t) / f.T));
            const std::vector<std::vector<double>> path(i + 1, xi);
            const double pi_i = expect(i, i, path);
            for (int j = i + 1; j <= N; ++j) worst = std::max(worst, expect(i, j, path) / pi_i);
        }
    }
    return worst;
}

InflationModel inflation_model(const InflationSpec& spec, const Lattice& L) {
    if (!(spec.A > 0.0 && spec.B > 0.0 && spec.gamma > 0.0 && spec.mu > 0.0))
        throw Error(Errc::invalid_input, "inflation: A, B, gamma and mu must be positive");
    check_dates(spec.dates, L.depth(), "inflation");
    check_field(L, spec.k, "inflation: consumption");
    check_field(L, spec.M, "inflation: money supply");
    check_field(L, spec.lambda, "inflation: liquidity benefit");
    InflationModel m;
    m.nominal.lattice = L;
    m.nominal.dates = spec.dates;
    m.nominal.pi = L.field();
    m.price_level = L.field();
    m.real_kernel = L.field();
    for (int i = 0; i <= L.depth(); ++i) {
        const double disc = std::exp(-spec.gamma * spec.dates[i]);
        for (std::size_t n = 0; n < L.size(i); ++n) {
            const double k = spec.k[i][n], M = spec.M[i][n], lam = spec.lambda[i][n];
            if (!(k > 0.0 && M > 0.0 && lam > 0.0))
                throw Error(Errc::invalid_input, "inflation: consumption, money and liquidity must be positive");
            m.price_level[i][n] = (spec.A / spec.B) * lam * M / k;
            m.nominal.pi[i][n] = spec.B * disc / (spec.mu * lam * M);
            m.real_kernel[i][n] = spec.A * disc / (spec.mu * k);
            const double vel = k * m.price_level[i][n] / M;
            m.velocity_error = std::max(m.velocity_error, std::abs(vel - (spec.A / spec.B) * lam));
        }
    }
    for (int i = 0; i <= L.depth(); ++i) {
        std::vector<double> f(L.size(i));
        for (std::size_t n = 0; n < f.size(); ++n)
            f[n] = m.nominal.pi[i][n] * (m.price_level[i][n] * spec.k[i][n] + spec.lambda[i][n] * spec.M[i][n]);
        m.budget += L.conditional(f, 0, i)[0];
    }
    return m;
}

double claim_value(const KernelModel& nominal, int j, const std::vector<double>& H) {
    if (H.size() != nominal.lattice.size(j)) throw Error(Errc::invalid_input, "claim: payoff has the wrong shape");
    std::vector<double> f(H.size());
    for (std::size_t n = 0; n < f.size(); ++n) f[n] = nominal.pi[j][n] * H[n];
    return nominal.lattice.conditional(f, 0, j)[0] / nominal.pi[0][0];
}

std::pair<double, double> index_linked_value(const InflationModel& m, int j) {
    const double nominal = claim_value(m.nominal, j, m.price_level[j]);
    const double real =
        m.nominal.lattice.conditional(m.real_kernel[j], 0, j)[0] / m.real_kernel[0][0] * m.price_level[0][0];
    return {nominal, real};
}

} // namespace infoflow
