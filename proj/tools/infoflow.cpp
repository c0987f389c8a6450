// infoflow command-line front end.
//
//   infoflow simulate|price|reduce|rates|ad-density|verify --config <path> --seed <u64>
//            --out <dir> --format csv|json [--verify]
//
// Exit codes: 0 ok, 2 config error, 3 numeric divergence, 4 verification failure.

#include "infoflow/arrow_debreu.hpp"
#include "infoflow/equity.hpp"
#include "infoflow/option.hpp"
#include "infoflow/rates.hpp"
#include "infoflow/verify.hpp"
#include "infoflow/xfactor.hpp"
#include "infoflow/zfactor.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace infoflow;

namespace {

constexpr int kConfigError = 2, kDivergence = 3, kVerifyFailed = 4;

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& path, const std::string& msg) : std::runtime_error(path + ": " + msg) {}
};

// ---- config reading ----------------------------------------------------

const std::map<std::string, std::set<std::string>> kUnits = {
    {"years", {"years", "year", "y"}},
    {"rate", {"rate", "1/year", "per year"}},
    {"sigma", {"1/sqrt(year)", "per sqrt year", "sigma"}},
    {"probability", {"probability"}},
};

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double quantity_value(const json& q, const std::string& path, const std::string& units) {
    if (!q.is_object() || !q.contains("value") || !q.contains("units"))
        throw ConfigError(path, "expected {\"value\": <number>, \"units\": \"" + units + "\"}");
    if (!q["value"].is_number()) throw ConfigError(child(path, "value"), "expected a number");
    if (!q["units"].is_string()) throw ConfigError(child(path, "units"), "expected a string");
    const auto u = q["units"].get<std::string>();
    if (!kUnits.at(units).count(u)) throw ConfigError(child(path, "units"), "expected \"" + units + "\", got \"" + u + "\"");
    const double v = q["value"].get<double>();
    if (!std::isfinite(v)) throw ConfigError(child(path, "value"), "not finite");
    return v;
}

double quantity(const json& j, const std::string& path, const char* key, const std::string& units,
                std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(child(path, key), "missing");
    }
    return quantity_value(j[key], child(path, key), units);
}

double number(const json& j, const std::string& path, const char* key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(child(path, key), "missing");
    }
    if (!j[key].is_number()) throw ConfigError(child(path, key), "expected a number");
    return j[key].get<double>();
}

long integer(const json& j, const std::string& path, const char* key, std::optional<long> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(child(path, key), "missing");
    }
    if (!j[key].is_number_integer()) throw ConfigError(child(path, key), "expected an integer");
    return j[key].get<long>();
}

std::string text(const json& j, const std::string& path, const char* key, std::optional<std::string> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigError(child(path, key), "missing");
    }
    if (!j[key].is_string()) throw ConfigError(child(path, key), "expected a string");
    return j[key].get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(child(path, key), "missing");
    const json& a = j[key];
    if (!a.is_array()) throw ConfigError(child(path, key), "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ConfigError(item(child(path, key), i), "expected a number");
        v.push_back(a[i].get<double>());
    }
    return v;
}

std::vector<double> quantities(const json& j, const std::string& path, const char* key, const std::string& units) {
    if (!j.contains(key)) throw ConfigError(child(path, key), "missing");
    const json& a = j[key];
    if (!a.is_array()) throw ConfigError(child(path, key), "expected an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < a.size(); ++i) v.push_back(quantity_value(a[i], item(child(path, key), i), units));
    return v;
}

const json& object(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError(child(path, key), "missing");
    if (!j[key].is_object()) throw ConfigError(child(path, key), "expected an object");
    return j[key];
}

// Library validation errors carry no field path; attach the section being read.
template <class F>
auto within(const std::string& path, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() == Errc::invalid_input) throw ConfigError(path, e.what());
        throw;
    }
}

DiscretePayoff read_payoff(const json& j, const std::string& path) {
    const json& p = object(j, path, "payoff");
    const std::string at = child(path, "payoff");
    return within(at, [&] { return DiscretePayoff(numbers(p, at, "levels"), numbers(p, at, "probs")); });
}

ContinuousDensity read_prior(const json& j, const std::string& path) {
    const json& p = object(j, path, "prior");
    const std::string at = child(path, "prior");
    const std::string kind = text(p, at, "kind");
    return within(at, [&] {
        ContinuousDensity d;
        if (kind == "exponential") d = ContinuousDensity::exponential(number(p, at, "mean"));
        else if (kind == "gamma") d = ContinuousDensity::gamma(number(p, at, "rate"), static_cast<int>(integer(p, at, "shape")));
        else if (kind == "gaussian") d = ContinuousDensity::gaussian(number(p, at, "mean"), number(p, at, "variance"));
        else if (kind == "tabulated") d = ContinuousDensity::tabulated(numbers(p, at, "grid"), numbers(p, at, "weights"));
        else throw ConfigError(child(at, "kind"), "unknown density '" + kind + "'");
        d.validate();
        return d;
    });
}

Factor read_factor(const json& j, const std::string& path) {
    if (j.contains("payoff")) return read_payoff(j, path);
    if (j.contains("prior")) return read_prior(j, path);
    throw ConfigError(path, "need either 'payoff' or 'prior'");
}

InfoSpec read_spec(const json& j, const std::string& path) {
    InfoSpec s{quantity(j, path, "sigma", "sigma"), quantity(j, path, "T", "years")};
    within(path, [&] { s.validate(); return 0; });
    return s;
}

DiscountCurve read_curve(const json& j, const std::string& path) {
    return DiscountCurve::flat(quantity(j, path, "r", "rate", 0.0));
}

// ---- output ------------------------------------------------------------

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Output {
    fs::path dir;
    std::string format;

    void table(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::pair<std::string, std::vector<double>>>& rows) const {
        if (format == "csv") {
            std::ofstream f(dir / (name + ".csv"), std::ios::binary);
            for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
            f << "\n";
            for (const auto& [label, vals] : rows) {
                f << label;
                for (double v : vals) f << "," << fmt17(v);
                f << "\n";
            }
            if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".csv")).string());
        } else {
            json j;
            j["columns"] = header;
            j["rows"] = json::array();
            for (const auto& [label, vals] : rows) {
                json r = json::array({label});
                for (double v : vals) r.push_back(v);
                j["rows"].push_back(r);
            }
            write_json(name, j);
        }
    }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream f(dir / (name + ".json"), std::ios::binary);
        f << j.dump(2) << "\n";
        if (!f) throw std::runtime_error("cannot write " + (dir / (name + ".json")).string());
    }
};

// ---- simulate ----------------------------------------------------------

struct Regime {
    const char* tag;
    const char* label;
    int forced; // -1 all paths, 0 pin h0, 1 pin h1
};
const Regime kRegimes[] = {{"all", "all", -1}, {"ht1", "H_T=1", 1}, {"ht0", "H_T=0", 0}};

std::string sigma_tag(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", s);
    return buf;
}

int cmd_simulate(const json& cfg, std::uint64_t seed, const Output& out) {
    const double T = quantity(cfg, "", "T", "years", 5.0);
    const double r = quantity(cfg, "", "r", "rate", 0.05);
    const double pd = quantity(cfg, "", "p_default", "probability", 0.2);
    const double h0 = number(cfg, "", "h0", 0.0), h1 = number(cfg, "", "h1", 1.0);
    std::vector<double> sigmas{0.04, 0.2, 1.0, 5.0};
    if (cfg.contains("sigmas")) sigmas = quantities(cfg, "", "sigmas", "sigma");
    const long paths = integer(cfg, "", "paths", 50);
    const long spy = integer(cfg, "", "steps_per_year", 250);
    if (paths < 1 || paths > 1000000) throw ConfigError("paths", "must lie in 1..1000000");
    if (spy < 1) throw ConfigError("steps_per_year", "must be positive");
    if (!(pd > 0.0 && pd < 1.0)) throw ConfigError("p_default.value", "must lie in (0,1)");
    if (!(T > 0.0)) throw ConfigError("T.value", "must be positive");
    const auto payoff = within("h0", [&] { return DiscretePayoff::binary(h0, h1, 1.0 - pd); });
    const auto curve = DiscountCurve::flat(r);
    const auto steps = static_cast<std::size_t>(std::llround(static_cast<double>(spy) * T));
    const auto grid = TimeGrid::uniform(T, std::max<std::size_t>(steps, 1));
    const double EH = payoff.mean();

    json summary;
    summary["parameters"] = {{"T_years", T}, {"r", r}, {"p_default", pd}, {"h0", h0}, {"h1", h1},
                             {"paths", paths}, {"steps", grid.t.size() - 1}, {"seed", seed}};
    summary["regimes"] = json::array();
    summary["checks"] = json::array();

    for (std::size_t a = 0; a < sigmas.size(); ++a) {
        for (std::size_t c = 0; c < 3; ++c) {
            const Regime& reg = kRegimes[c];
            std::optional<double> forced;
            if (reg.forced >= 0) forced = reg.forced ? h1 : h0;
            const std::uint64_t sub = Stream::mix(seed * 0x100000001b3ULL + a * 4 + c + 1);
            const InfoSpec spec{sigmas[a], T};
            const auto bp = within("sigmas", [&] {
                return simulate_bond_paths(payoff, spec, curve, grid, static_cast<std::size_t>(paths), sub, forced);
            });
            const std::string name = "bond_sigma_" + sigma_tag(sigmas[a]) + "_" + reg.tag;
            std::vector<std::string> header{"t"};
            for (long p = 0; p < paths; ++p) header.push_back("path_" + std::to_string(p));
            std::vector<std::pair<std::string, std::vector<double>>> rows;
            for (std::size_t i = 0; i < bp.t.size(); ++i) {
                std::vector<double> v(paths);
                for (long p = 0; p < paths; ++p) v[p] = bp.price[p][i];
                rows.emplace_back(fmt17(bp.t[i]), std::move(v));
            }
            rows.emplace_back("H_T", bp.terminal);
            out.table(name, header, rows);

            double terminal_mean = 0.0;
            for (double h : bp.terminal) terminal_mean += h / paths;
            summary["regimes"].push_back({{"sigma", sigmas[a]}, {"condition", reg.label}, {"file", name},
                                          {"terminal_mean", terminal_mean}});

            // regime checks for the high- and low-information cases
            if (sigmas[a] >= 5.0 && reg.forced == 0) {
                double s = 0.0;
                std::size_t n = 0;
                for (std::size_t i = 0; i < bp.t.size(); ++i)
                    if (bp.t[i] >= T - 1.0 && bp.t[i] < T)
                        for (long p = 0; p < paths; ++p) s += bp.price[p][i], ++n;
                const double m = n ? s / n : 0.0;
                summary["checks"].push_back({{"name", "final-year mean price, sigma " + sigma_tag(sigmas[a]) + ", H_T=0"},
                                             {"value", m}, {"threshold", 0.05}, {"passed", m < 0.05}});
            }
            if (sigmas[a] >= 5.0 && reg.forced < 0) {
                std::size_t i = 0;
                while (i + 1 < bp.t.size() && bp.t[i] < 0.999 * T) ++i;
                if (i + 1 == bp.t.size() && i > 0) --i;
                const double P = curve.P(bp.t[i], T);
                long ok = 0;
                for (long p = 0; p < paths; ++p)
                    if (std::abs(bp.price[p][i] - P * bp.terminal[p]) <= 0.01 * P * std::max(std::abs(h0), std::abs(h1))) ++ok;
                const double frac = static_cast<double>(ok) / paths;
                summary["checks"].push_back({{"name", "paths within 1% of P_tT H_T near maturity, sigma " + sigma_tag(sigmas[a])},
                                             {"t", bp.t[i]}, {"value", frac}, {"threshold", 0.99}, {"passed", frac >= 0.99}});
            }
            if (sigmas[a] <= 0.04 && reg.forced == 0) {
                long ok = 0;
                for (long p = 0; p < paths; ++p) {
                    bool above = true;
                    for (std::size_t i = 0; i < bp.t.size() && bp.t[i] < T - 1.0; ++i)
                        above = above && bp.price[p][i] > 0.5 * curve.P(bp.t[i], T) * EH;
                    ok += above;
                }
                const double frac = static_cast<double>(ok) / paths;
                summary["checks"].push_back({{"name", "H_T=0 paths above half the expected value before the final year, sigma " +
                                                          sigma_tag(sigmas[a])},
                                             {"value", frac}, {"threshold", 0.9}, {"passed", frac >= 0.9}});
            }
        }
    }
    out.write_json("simulate_summary", summary);
    return 0;
}

// ---- price -------------------------------------------------------------

json report(double value, const std::string& method, double tol, json diagnostics) {
    return {{"value", value}, {"method", method}, {"tolerance", tol}, {"diagnostics", std::move(diagnostics)}};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int cmd_price(const json& cfg, std::uint64_t seed, const Output& out) {
    const json& ins = object(cfg, "", "instrument");
    const std::string at = "instrument";
    const std::string type = text(ins, at, "type");
    json rep;
    bool agree = true;

    if (type == "bond") {
        const auto payoff = read_payoff(ins, at);
        const auto spec = read_spec(ins, at);
        const auto curve = read_curve(ins, at);
        const double t = quantity(ins, at, "t", "years", 0.0), xi = number(ins, at, "xi", 0.0);
        const auto b = within(at, [&] { return price_bond(payoff, spec, curve, t, xi); });
        // cross-check: expected payoff under the filter, discounted
        double ev = 0.0;
        for (std::size_t i = 0; i < payoff.size(); ++i) ev += b.probs[i] * payoff.h[i];
        const double res = rel_diff(curve.P(t, spec.T) * ev, b.price);
        agree = res < 1e-12;
        rep = report(b.price, "closed-form", 1e-12,
                     {{"probs", b.probs}, {"mean", b.mean}, {"variance", b.variance}, {"skew", b.skew}, {"vol", b.vol},
                      {"vol_of_vol", b.vol_of_vol}, {"cross_check_residual", res}});
    } else if (type == "option") {
        OptionSpec opt;
        opt.payoff = read_payoff(ins, at);
        opt.spec = read_spec(ins, at);
        opt.curve = read_curve(ins, at);
        opt.K = number(ins, at, "K");
        opt.t = quantity(ins, at, "t", "years");
        within(at, [&] { opt.validate(); return 0; });
        const auto branch = call_branch(opt);
        const bool binary = opt.payoff.size() == 2;
        const double closed = binary ? price_binary_call(opt) : price_multirecovery_call(opt);
        const auto ad = ad_density(opt.spec, opt.payoff, opt.curve, opt.t);
        const double via_ad = price_info_derivative(ad, [&](double x) {
            return std::max(price_bond(opt.payoff, opt.spec, opt.curve, opt.t, x).price - opt.K, 0.0);
        }, 1e-12);
        const double res = std::abs(via_ad - closed) / std::max(closed, 1e-12);
        agree = res < 1e-8;
        json diag = {{"branch", branch_name(branch)}, {"ad_quadrature", via_ad}, {"cross_check_residual", res}};
        if (branch == CallBranch::interior) diag["critical_xi"] = critical_information(opt);
        if (ins.value("greeks", false)) {
            if (!binary) throw ConfigError(child(at, "greeks"), "greeks need a two-level payoff");
            try {
                const auto g = greeks(opt);
                diag["vega"] = g.vega;
                diag["delta"] = g.delta;
            } catch (const Error& e) {
                if (e.code() == Errc::greeks_undefined) throw ConfigError(child(at, "K"), e.what());
                throw;
            }
        }
        rep = report(closed, binary ? "binary closed form" : "multi-recovery closed form", 1e-8, diag);
    } else if (type == "asset") {
        const SingleDividendAsset asset{read_prior(ins, at), read_spec(ins, at), read_curve(ins, at)};
        const double t = quantity(ins, at, "t", "years", 0.0), xi = number(ins, at, "xi", 0.0);
        const double v = within(at, [&] { return price_single_dividend(asset, t, xi); });
        const Posterior q(asset.prior, asset.spec, t, xi, Posterior::Method::quadrature);
        const double quad = asset.curve.P(t, asset.spec.T) * q.mean();
        const double res = rel_diff(quad, v);
        agree = res < 1e-8;
        json diag = {{"quadrature", quad}, {"cross_check_residual", res}};
        if (ins.contains("call")) {
            const json& c = object(ins, at, "call");
            const double K = number(c, child(at, "call"), "K"), tc = quantity(c, child(at, "call"), "t", "years");
            const double bm = within(child(at, "call"), [&] { return price_call_bridge_measure(asset, K, tc); });
            const double adc = price_continuous_call_via_ad(asset.prior, asset.spec, asset.curve, K, tc);
            diag["call"] = {{"bridge_measure", bm}, {"arrow_debreu", adc}, {"residual", rel_diff(adc, bm)}};
            agree = agree && rel_diff(adc, bm) < 1e-8;
        }
        rep = report(v, "single-dividend closed form", 1e-8, diag);
    } else if (type == "bs_recovery") {
        const double S0 = number(ins, at, "S0"), r = quantity(ins, at, "r", "rate"), nu = quantity(ins, at, "nu", "sigma");
        const double T = quantity(ins, at, "T", "years"), sigma = quantity(ins, at, "sigma", "sigma");
        const double t = quantity(ins, at, "t", "years", 0.0), xi = number(ins, at, "xi", 0.0);
        const auto b = within(at, [&] { return bs_recovery_price(S0, r, nu, T, sigma, t, xi); });
        rep = report(b.price, "closed form", 1e-12, {{"vol", b.vol}});
    } else if (type == "coupon_bond" || type == "graph") {
        CashFlowGraph g;
        if (type == "coupon_bond") {
            CouponBondSpec s;
            s.coupon = number(ins, at, "coupon");
            s.principal = number(ins, at, "principal", 1.0);
            s.dates = quantities(ins, at, "dates", "years");
            s.recovery = numbers(ins, at, "recovery");
            s.survival = numbers(ins, at, "survival");
            s.sigma = quantities(ins, at, "sigmas", "sigma");
            g = within(at, [&] { return coupon_bond_graph(s); });
        } else {
            if (!ins.contains("factors") || !ins["factors"].is_array()) throw ConfigError(child(at, "factors"), "expected an array");
            for (std::size_t i = 0; i < ins["factors"].size(); ++i) {
                const std::string fp = item(child(at, "factors"), i);
                const json& f = ins["factors"][i];
                within(fp, [&] {
                    return g.add_factor({text(f, fp, "id"), quantity(f, fp, "T", "years"), read_factor(f, fp),
                                         quantity(f, fp, "sigma", "sigma")});
                });
            }
            if (!ins.contains("flows") || !ins["flows"].is_array()) throw ConfigError(child(at, "flows"), "expected an array");
            for (std::size_t i = 0; i < ins["flows"].size(); ++i) {
                const std::string fp = item(child(at, "flows"), i);
                const json& f = ins["flows"][i];
                within(fp, [&] { g.add_flow(quantity(f, fp, "T", "years"), text(f, fp, "payout")); return 0; });
            }
        }
        MarketScenario s;
        if (ins.contains("scenario")) {
            const json& sc = object(ins, at, "scenario");
            const std::string sp = child(at, "scenario");
            s.t = quantity(sc, sp, "t", "years", 0.0);
            for (const char* key : {"xi", "realized"})
                if (sc.contains(key)) {
                    if (!sc[key].is_object()) throw ConfigError(child(sp, key), "expected an object");
                    for (auto& [id, v] : sc[key].items()) {
                        if (!v.is_number()) throw ConfigError(child(child(sp, key), id), "expected a number");
                        (std::string(key) == "xi" ? s.xi : s.realized)[id] = v.get<double>();
                    }
                }
        }
        const auto curve = read_curve(ins, at);
        const auto p = within(at, [&] { return price_asset_detailed(g, s, curve, seed); });
        json diag = {{"std_error", p.std_error}};
        try {
            const auto vv = volatility_vector(g, s, curve);
            json gam;
            for (std::size_t i = 0; i < vv.ids.size(); ++i) gam[vv.ids[i]] = vv.gamma[i];
            diag["volatility"] = gam;
            diag["total_volatility"] = vv.total;
        } catch (const Error& e) {
            diag["volatility_error"] = e.what();
        }
        rep = report(p.value, p.method, p.method == "monte-carlo" ? 3 * p.std_error : 1e-13, diag);
    } else {
        throw ConfigError(child(at, "type"), "unknown instrument '" + type + "'");
    }
    rep["agreement"] = agree;
    out.write_json("price", rep);
    std::cout << rep.dump(2) << "\n";
    return agree ? 0 : kVerifyFailed;
}

// ---- reduce ------------------------------------------------------------

int cmd_reduce(const json& cfg, std::uint64_t seed, const Output& out) {
    const int n = static_cast<int>(integer(cfg, "", "n"));
    if (n < 1 || n > 20) throw ConfigError("n", "must lie in 1..20");
    JointDistribution joint;
    std::vector<double> p;
    if (cfg.contains("joint")) {
        joint = within("joint", [&] {
            JointDistribution j{n, numbers(cfg, "", "joint")};
            j.validate();
            return j;
        });
        p = x_probs_from_joint(joint);
    } else if (cfg.contains("x_probs")) {
        auto v = numbers(cfg, "", "x_probs"); // p_X1 .. p_X(2^n-1)
        v.insert(v.begin(), 0.0);
        p = v;
        joint = within("x_probs", [&] { return joint_from_x_probs(n, p); });
    } else {
        throw ConfigError("joint", "missing (or give x_probs)");
    }
    const auto tree = build_reduction(n);
    const auto back = joint_from_x_probs(n, p);
    double rt = 0.0;
    for (std::size_t i = 0; i < joint.q.size(); ++i) rt = std::max(rt, std::abs(back.q[i] - joint.q[i]));

    json j;
    j["n"] = n;
    j["expressions"] = json::array();
    j["latex"] = json::array();
    for (int k = 1; k <= n; ++k) {
        j["expressions"].push_back(tree.plain(k));
        j["latex"].push_back(tree.latex(k));
    }
    json px;
    for (int k = 1; k <= tree.factor_count(); ++k) px["X" + std::to_string(k)] = p[k];
    j["p_X"] = px;
    j["round_trip_error"] = rt;
    j["round_trip_ok"] = rt < 1e-13;

    const long samples = integer(cfg, "", "samples", 0);
    if (samples > 0) {
        const auto counts = sample_patterns(tree, p, static_cast<std::size_t>(samples), seed);
        double chi = 0.0;
        int dof = -1;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double e = joint.q[i] * samples;
            if (e <= 0.0) continue;
            chi += (counts[i] - e) * (counts[i] - e) / e;
            ++dof;
        }
        double pval = 1.0;
        if (dof > 0) pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi));
        j["sampling"] = {{"samples", samples}, {"chi_square", chi}, {"dof", dof}, {"p_value", pval}};
    }

    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int k = 1; k <= tree.factor_count(); ++k) rows.emplace_back("X" + std::to_string(k), std::vector<double>{p[k]});
    out.table("reduce_px", {"factor", "p"}, rows);
    out.write_json("reduce", j);
    for (int k = 1; k <= n; ++k) std::cout << tree.plain(k) << "\n";
    return rt < 1e-13 ? 0 : kVerifyFailed;
}

// ---- rates -------------------------------------------------------------

json path_report_json(const PathReport& r) {
    return {{"paths", r.paths},
            {"bond_vs_account", r.bond_vs_account},
            {"rho_martingale", r.rho_martingale},
            {"account_closed_form", r.account_closed_form},
            {"rho_closed_form", r.rho_closed_form},
            {"doob_identity", r.doob_identity},
            {"doob_short_rate", r.doob_short_rate},
            {"doob_martingale", r.doob_martingale},
            {"account_increasing", r.account_increasing},
            {"doob_increasing", r.doob_increasing}};
}

int cmd_rates(const json& cfg, std::uint64_t, const Output& out) {
    const std::string model = text(cfg, "", "model");
    json j;
    j["model"] = model;
    if (model == "rational" || model == "deterministic") {
        const long depth = integer(cfg, "", "depth");
        if (depth < 1 || depth > 30) throw ConfigError("depth", "lattice depth must lie in 1..30");
        const double dt = quantity(cfg, "", "dt", "years", 1.0);
        KernelModel m;
        std::optional<RationalSpec> rs;
        if (model == "rational") {
            RationalSpec r;
            const double a0 = number(cfg, "", "alpha0", 0.5), b0 = number(cfg, "", "beta0", 0.5);
            const double ar = quantity(cfg, "", "alpha_decay", "rate", 0.03);
            const double br = quantity(cfg, "", "beta_decay", "rate", 0.05);
            r.N0 = number(cfg, "", "N0", 1.0);
            r.u = number(cfg, "", "u", 1.1);
            r.d = number(cfg, "", "d", 0.9);
            for (long i = 0; i <= depth; ++i) {
                r.dates.push_back(i * dt);
                r.alpha.push_back(a0 * std::exp(-ar * i * dt));
                r.beta.push_back(b0 * std::exp(-br * i * dt));
            }
            m = within("model", [&] { return build_rational(r); });
            rs = r;
        } else {
            const double r = quantity(cfg, "", "r", "rate");
            m.lattice = Lattice::binomial(static_cast<int>(depth), 0.5);
            for (long i = 0; i <= depth; ++i) m.dates.push_back(i * dt);
            m.pi = m.lattice.field();
            for (long i = 0; i <= depth; ++i)
                for (double& v : m.pi[i]) v = std::exp(-r * m.dates[i]);
            within("r", [&] { m.validate(); return 0; });
        }
        const auto P = bond_price_matrix(m);
        std::vector<std::pair<std::string, std::vector<double>>> rows;
        for (long jj = 0; jj <= depth; ++jj) {
            const double p = P[0][jj][0];
            rows.emplace_back(fmt17(m.dates[jj]), std::vector<double>{p, jj ? -std::log(p) / m.dates[jj] : 0.0});
        }
        out.table("rates_curve", {"t", "P_0t", "yield"}, rows);
        double closed = 0.0;
        if (rs)
            for (long i = 0; i <= depth; ++i)
                for (long jj = i; jj <= depth; ++jj)
                    for (long k = 0; k <= i; ++k)
                        closed = std::max(closed, std::abs(P[i][jj - i][k] - rational_bond_price(*rs, i, jj, k)));
        j["closed_form_residual"] = closed;
        const auto fh = fh_representation(m);
        j["fh"] = {{"reconstruction_error", fh.reconstruction_error}, {"martingale_error", fh.martingale_error},
                   {"positive", fh.positive}};
        // a path report over every path is 2^depth long; cap the enumeration
        if (depth <= 22) j["axioms"] = path_report_json(check_paths(m, rs));
        std::string path = text(cfg, "", "path", std::string(depth, 'u'));
        if (static_cast<long>(path.size()) != depth || path.find_first_not_of("ud") != std::string::npos)
            throw ConfigError("path", "expected " + std::to_string(depth) + " characters from {u, d}");
        std::uint64_t bits = 0;
        for (long i = 0; i < depth; ++i)
            if (path[i] == 'u') bits |= std::uint64_t{1} << i;
        j["money_market_path"] = money_market_path(m, bits);
        const bool ok = closed < 1e-12 && fh.reconstruction_error < 1e-12;
        j["ok"] = ok;
        out.write_json("rates", j);
        std::cout << j.dump(2) << "\n";
        return ok ? 0 : kVerifyFailed;
    }
    if (model == "inflation") {
        const long depth = integer(cfg, "", "depth", 4);
        if (depth < 1 || depth > 20) throw ConfigError("depth", "tree depth must lie in 1..20");
        const double q = quantity(cfg, "", "q_up", "probability", 0.5);
        const auto L = within("q_up", [&] { return Lattice::binary_tree(static_cast<int>(depth), q); });
        InflationSpec s;
        s.A = number(cfg, "", "A", 1.0);
        s.B = number(cfg, "", "B", 0.5);
        s.gamma = quantity(cfg, "", "gamma", "rate", 0.03);
        s.mu = number(cfg, "", "mu", 1.0);
        const double dt = quantity(cfg, "", "dt", "years", 1.0);
        const double k0 = number(cfg, "", "k0", 1.0), ku = number(cfg, "", "k_up", 1.03), kd = number(cfg, "", "k_down", 0.99);
        const double M0 = number(cfg, "", "M0", 1.0), Mu = number(cfg, "", "M_up", 1.05), Md = number(cfg, "", "M_down", 1.01);
        const double lam = number(cfg, "", "lambda", 0.05);
        for (long i = 0; i <= depth; ++i) s.dates.push_back(i * dt);
        s.k = L.field();
        s.M = L.field();
        s.lambda = L.field(lam);
        for (long i = 0; i <= depth; ++i)
            for (std::size_t n = 0; n < L.size(i); ++n) {
                const int up = L.ups(i, n), dn = static_cast<int>(i) - up;
                s.k[i][n] = k0 * std::pow(ku, up) * std::pow(kd, dn);
                s.M[i][n] = M0 * std::pow(Mu, up) * std::pow(Md, dn);
            }
        const auto m = within("model", [&] { return inflation_model(s, L); });
        std::vector<std::pair<std::string, std::vector<double>>> rows;
        std::size_t node = 0;
        double worst = 0.0;
        json il = json::array();
        for (long i = 0; i <= depth; ++i) {
            if (i > 0) node = 2 * node + 1; // all-up path
            const auto [a, b] = index_linked_value(m, static_cast<int>(i));
            worst = std::max(worst, std::abs(a - b) / b);
            il.push_back({{"t", s.dates[i]}, {"nominal_kernel", a}, {"real_kernel", b}});
            rows.emplace_back(fmt17(s.dates[i]), std::vector<double>{m.price_level[i][node], a});
        }
        out.table("inflation_path", {"t", "price_level_up_path", "index_linked_value"}, rows);
        j["index_linked"] = il;
        j["index_linked_residual"] = worst;
        j["velocity_error"] = m.velocity_error;
        j["budget"] = m.budget;
        const bool ok = worst < 1e-13;
        j["ok"] = ok;
        out.write_json("rates", j);
        std::cout << j.dump(2) << "\n";
        return ok ? 0 : kVerifyFailed;
    }
    throw ConfigError("model", "unknown model '" + model + "'");
}

// ---- ad-density --------------------------------------------------------

int cmd_ad_density(const json& cfg, std::uint64_t, const Output& out) {
    const Factor f = read_factor(cfg, "");
    const auto spec = read_spec(cfg, "");
    const auto curve = read_curve(cfg, "");
    const double t = quantity(cfg, "", "t", "years");
    const auto ad = within("t", [&] { return ad_density(spec, f, curve, t); });
    const long points = integer(cfg, "", "points", 201);
    if (points < 2) throw ConfigError("points", "need at least 2");
    const double lo = number(cfg, "", "lo", ad.lo()), hi = number(cfg, "", "hi", ad.hi());
    if (!(hi > lo)) throw ConfigError("hi", "must exceed lo");
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (long i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        rows.emplace_back(fmt17(x), std::vector<double>{ad(x)});
    }
    out.table("ad_density", {"xi", "density"}, rows);
    const double mass = ad.integrate([](double) { return 1.0; }, 1e-12);
    const double res = std::abs(mass - curve.P(t));
    json j = {{"t", t}, {"integral", mass}, {"discount", curve.P(t)}, {"residual", res}, {"ok", res < 1e-10}};
    out.write_json("ad_density_summary", j);
    std::cout << j.dump(2) << "\n";
    return res < 1e-10 ? 0 : kVerifyFailed;
}

// ---- verify ------------------------------------------------------------

int cmd_verify(std::uint64_t seed, const Output* out) {
    const auto res = run_verification(seed);
    bool ok = true;
    json j = json::array();
    for (const auto& r : res) {
        ok = ok && r.passed;
        std::printf("%-4s %-8s %-42s residual %.3e (tol %.1e)%s%s\n", r.passed ? "ok" : "FAIL", r.module.c_str(),
                    r.name.c_str(), r.residual, r.tolerance, r.detail.empty() ? "" : "  ", r.detail.c_str());
        j.push_back({{"module", r.module}, {"check", r.name}, {"residual", std::isfinite(r.residual) ? json(r.residual) : json()},
                     {"tolerance", r.tolerance}, {"passed", r.passed}, {"detail", r.detail}});
    }
    if (out) out->write_json("verify", j);
    return ok ? 0 : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-based asset pricing toolkit"};
    app.require_subcommand(1);
    std::string config, outdir = ".", format = "csv";
    std::uint64_t seed = 1;
    bool verify_after = false;
    std::map<std::string, CLI::App*> subs;
    for (const char* name : {"simulate", "price", "reduce", "rates", "ad-density", "verify"}) {
        auto* s = app.add_subcommand(name);
        s->add_option("--config", config, "JSON config file");
        s->add_option("--seed", seed, "random seed");
        s->add_option("--out", outdir, "output directory");
        s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_flag("--verify", verify_after, "run the cross-check suite afterwards");
        subs[name] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    std::string cmd;
    for (auto& [name, s] : subs)
        if (s->parsed()) cmd = name;

    try {
        std::error_code ec;
        fs::create_directories(outdir, ec);
        if (ec) throw ConfigError("--out", "cannot create " + outdir);
        const Output out{outdir, format};
        if (cmd == "verify") return cmd_verify(seed, &out);

        json cfg = json::object();
        if (!config.empty()) {
            std::ifstream f(config);
            if (!f) throw ConfigError("--config", "cannot open " + config);
            try {
                cfg = json::parse(f);
            } catch (const json::parse_error& e) {
                throw ConfigError("--config", e.what());
            }
            if (!cfg.is_object()) throw ConfigError("$", "config must be a JSON object");
        } else if (cmd != "simulate") {
            throw ConfigError("--config", "required for " + cmd);
        }

        int rc = 0;
        if (cmd == "simulate") rc = cmd_simulate(cfg, seed, out);
        else if (cmd == "price") rc = cmd_price(cfg, seed, out);
        else if (cmd == "reduce") rc = cmd_reduce(cfg, seed, out);
        else if (cmd == "rates") rc = cmd_rates(cfg, seed, out);
        else if (cmd == "ad-density") rc = cmd_ad_density(cfg, seed, out);
        if (rc == 0 && verify_after) rc = cmd_verify(seed, nullptr);
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
        return (e.code() == Errc::divergence || e.code() == Errc::degenerate) ? kDivergence : kConfigError;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
