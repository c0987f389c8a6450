#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("infoflow_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Run {
    int code = -1;
    std::string out, err;
};

Run run(const std::string& args, const std::string& config = "", const std::string& env = "") {
    static int n = 0;
    const auto base = scratch() / std::to_string(n++);
    fs::create_directories(base);
    std::string cmd = env + (env.empty() ? "" : " ") + INFOFLOW_CLI + " " + args;
    if (!config.empty()) {
        std::ofstream(base / "cfg.json") << config;
        cmd += " --config " + (base / "cfg.json").string();
    }
    cmd += " --out " + (base / "out").string() + " > " + (base / "stdout").string() + " 2> " + (base / "stderr").string();
    const int st = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(base / "stdout");
    r.err = slurp(base / "stderr");
    return r;
}

const char* kBond = R"json({"instrument": {"type": "bond", "payoff": {"levels": [0.3, 1], "probs": [0.2, 0.8]},
  "sigma": {"value": 0.5, "units": "1/sqrt(year)"}, "T": {"value": 2, "units": "years"},
  "r": {"value": 0.04, "units": "rate"}, "t": {"value": 0.5, "units": "years"}, "xi": 0.1}})json";

} // namespace

TEST_CASE("price reports a value and its cross-check") {
    const auto r = run("price", kBond);
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    for (const char* k : {"value", "method", "tolerance", "diagnostics", "agreement"}) CHECK(j.contains(k));
    CHECK(j["agreement"].get<bool>());
    CHECK(j["value"].get<double>() > 0.0);
}

TEST_CASE("configuration errors name the field") {
    std::string bad = kBond;
    bad.replace(bad.find("\"rate\""), 6, "\"percent\"");
    auto r = run("price", bad);
    CHECK(r.code == 2);
    CHECK(r.err.find("instrument.r.units") != std::string::npos);

    bad = kBond;
    bad.replace(bad.find("[0.2, 0.8]"), 10, "[0.5, 0.8]");
    r = run("price", bad);
    CHECK(r.code == 2);
    CHECK(r.err.find("instrument.payoff") != std::string::npos);

    r = run("price", "{not json");
    CHECK(r.code == 2);
    r = run("rates", R"({"model": "rational", "depth": 31})");
    CHECK(r.code == 2);
    CHECK(r.err.find("depth") != std::string::npos);
}

TEST_CASE("numerical divergence exits with 3") {
    // the posterior of an exponential prior is not integrable for large xi at t = 0+
    const auto r = run("price", R"json({"instrument": {"type": "asset", "prior": {"kind": "exponential", "mean": 1},
      "sigma": {"value": 1, "units": "sigma"}, "T": {"value": 1, "units": "years"}, "xi": 10}})json");
    CHECK(r.code == 3);
    const auto z = run("reduce", R"({"n": 2, "joint": [0.0, 0.5, 0.0, 0.5]})");
    CHECK(z.code == 3);
}

TEST_CASE("density summary integrates over the full range") {
    // the lo/hi window only shapes the table
    const auto r = run("ad-density --format json", R"json({"payoff": {"levels": [0, 1], "probs": [0.5, 0.5]},
      "sigma": {"value": 1, "units": "sigma"}, "T": {"value": 2, "units": "years"},
      "r": {"value": 0.03, "units": "rate"}, "t": {"value": 1, "units": "years"}, "lo": -0.2, "hi": 0.2, "points": 11})json");
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["integral"].get<double>() == doctest::Approx(std::exp(-0.03)).epsilon(1e-10));
    CHECK(j["ok"].get<bool>());
}

TEST_CASE("reduce and verify") {
    const auto r = run("reduce", R"({"n": 2, "joint": [0.1, 0.2, 0.3, 0.4]})");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Z2 = X1 (z2 X2 + ~z2 ~X2) + ~X1 (z2 X3 + ~z2 ~X3)") != std::string::npos);
    CHECK(run("verify").code == 0);
}

TEST_CASE("output does not depend on the thread count") {
    const char* cfg = R"json({"instrument": {"type": "graph",
      "factors": [{"id": "A", "T": {"value": 1, "units": "years"}, "sigma": {"value": 0.5, "units": "sigma"},
                   "payoff": {"levels": [0, 1], "probs": [0.4, 0.6]}}],
      "flows": [{"T": {"value": 1, "units": "years"}, "payout": "A"}]}})json";
    const auto a = run("price --seed 3 --format json", cfg, "INFOFLOW_THREADS=1");
    const auto b = run("price --seed 3 --format json", cfg, "INFOFLOW_THREADS=3");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}
