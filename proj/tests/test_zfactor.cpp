#include "infoflow/zfactor.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace infoflow;

namespace {

// Prefix of Z-values reached at tree node k (depth = floor(log2 k)): even child means z.
std::vector<bool> prefix_of(int k) {
    std::vector<bool> out;
    for (; k > 1; k /= 2) out.insert(out.begin(), k % 2 == 0);
    return out;
}

} // namespace

TEST_CASE("exactly one term of each Z is active") {
    const auto tree = build_reduction(4);
    CHECK(tree.factor_count() == 15);
    for (int j = 1; j <= 4; ++j) CHECK(tree.z[j - 1].size() == (std::size_t{1} << (j - 1)));
    for (std::uint32_t bits = 0; bits < (1u << 15); ++bits) {
        std::vector<int> x(16, 0);
        for (int k = 1; k <= 15; ++k) x[k] = (bits >> (k - 1)) & 1;
        const auto z = evaluate_reduction(tree, x);
        // walk the tree directly: Z_j = z_j iff X at the current node is 1
        int node = 1;
        for (int j = 0; j < 4; ++j) {
            CHECK(z[j] == (x[node] == 1));
            node = 2 * node + (x[node] ? 0 : 1);
        }
    }
    CHECK_THROWS_AS(evaluate_reduction(tree, std::vector<int>(16, 2)), Error);
    CHECK_THROWS_AS(evaluate_reduction(tree, std::vector<int>(5, 0)), Error);
}

TEST_CASE("text forms") {
    const auto tree = build_reduction(2);
    CHECK(tree.plain(1) == "Z1 = z1 X1 + ~z1 ~X1");
    CHECK(tree.plain(2) == "Z2 = X1 (z2 X2 + ~z2 ~X2) + ~X1 (z2 X3 + ~z2 ~X3)");
    CHECK(tree.latex(2) == "Z_2=X_1(z_2 X_2+\\bar{z}_2\\bar{X}_2)+\\bar{X}_1(z_2 X_3+\\bar{z}_2\\bar{X}_3)");
    CHECK(JointDistribution::label(3, 0b101) == "z1 ~z2 z3");
    CHECK_THROWS_AS(build_reduction(0), Error);
    CHECK_THROWS_AS(tree.plain(3), Error);
}

TEST_CASE("X probabilities are conditional Z probabilities") {
    const int n = 3;
    JointDistribution joint{n, {0.05, 0.1, 0.15, 0.2, 0.08, 0.12, 0.13, 0.17}};
    const auto p = x_probs_from_joint(joint);
    for (int k = 1; k < 8; ++k) {
        const auto pre = prefix_of(k);
        const int j = static_cast<int>(pre.size());
        double num = 0.0, den = 0.0;
        for (std::size_t pat = 0; pat < joint.q.size(); ++pat) {
            bool match = true;
            for (int i = 0; i < j; ++i) match = match && (((pat >> i) & 1) == pre[i]);
            if (!match) continue;
            den += joint.q[pat];
            if ((pat >> j) & 1) num += joint.q[pat];
        }
        CHECK(p[k] == doctest::Approx(num / den).epsilon(1e-14));
    }
    const auto back = joint_from_x_probs(n, p);
    for (std::size_t i = 0; i < 8; ++i) CHECK(back.q[i] == doctest::Approx(joint.q[i]).epsilon(1e-14));
}

TEST_CASE("sampled patterns follow the joint law") {
    const int n = 2;
    JointDistribution joint{n, {0.1, 0.2, 0.3, 0.4}};
    const auto tree = build_reduction(n);
    const std::size_t N = 200000;
    const auto counts = sample_patterns(tree, x_probs_from_joint(joint), N, 11);
    for (std::size_t i = 0; i < 4; ++i) {
        const double f = static_cast<double>(counts[i]) / N, se = std::sqrt(joint.q[i] * (1 - joint.q[i]) / N);
        CHECK(std::abs(f - joint.q[i]) < 5 * se);
    }
}

TEST_CASE("joint validation") {
    CHECK_THROWS_AS((JointDistribution{2, {0.5, 0.5, 0.1}}).validate(), Error);
    CHECK_THROWS_AS((JointDistribution{2, {0.5, 0.6, -0.1, 0.0}}).validate(), Error);
    CHECK_THROWS_AS((JointDistribution{2, {0.5, 0.4, 0.0, 0.0}}).validate(), Error);
    // Z_1 = zbar_1 has no mass, so X_3 is undefined
    try {
        x_probs_from_joint({2, {0.0, 0.5, 0.0, 0.5}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate);
    }
}
