#include "infoflow/zfactor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace infoflow {

ReductionTree build_reduction(int n) {
    if (n < 1) throw Error(Errc::invalid_input, "reduction: need n >= 1");
    if (n > 20) throw Error(Errc::unsupported, "reduction: expressions limited to n <= 20");
    ReductionTree t;
    t.n = n;
    for (int j = 1; j <= n; ++j) {
        std::vector<XTerm> terms;
        for (int leaf = 1 << (j - 1); leaf < (1 << j); ++leaf) {
            XTerm term;
            term.leaf = leaf;
            for (int d = j - 1; d >= 1; --d) {
                const int child = leaf >> (j - 1 - d); // ancestor at depth d+1
                term.path.emplace_back(child >> 1, (child & 1) == 0);
            }
            std::reverse(term.path.begin(), term.path.end());
            terms.push_back(std::move(term));
        }
        t.z.push_back(std::move(terms));
    }
    return t;
}

namespace {

std::string sub(int k) { return k < 10 ? std::to_string(k) : "{" + std::to_string(k) + "}"; }

} // namespace

std::string ReductionTree::latex(int j) const {
    if (j < 1 || j > n) throw Error(Errc::invalid_input, "reduction: Z index out of range");
    std::string s = "Z_" + sub(j) + "=";
    const auto& terms = z[j - 1];
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const XTerm& t = terms[i];
        if (i > 0) s += "+";
        std::string path;
        for (const auto& [node, on] : t.path) {
            if (!path.empty()) path += " ";
            path += (on ? "X_" : "\\bar{X}_") + sub(node);
        }
        const std::string inner = "z_" + sub(j) + " X_" + sub(t.leaf) + "+\\bar{z}_" + sub(j) + "\\bar{X}_" + sub(t.leaf);
        s += path.empty() ? inner : path + "(" + inner + ")";
    }
    return s;
}

std::string ReductionTree::plain(int j) const {
    if (j < 1 || j > n) throw Error(Errc::invalid_input, "reduction: Z index out of range");
    std::string s = "Z" + std::to_string(j) + " =";
    const auto& terms = z[j - 1];
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const XTerm& t = terms[i];
        if (i > 0) s += " +";
        for (const auto& [node, on] : t.path) s += (on ? " X" : " ~X") + std::to_string(node);
        const std::string zj = std::to_string(j), leaf = std::to_string(t.leaf);
        const std::string inner = "z" + zj + " X" + leaf + " + ~z" + zj + " ~X" + leaf;
        s += t.path.empty() ? " " + inner : " (" + inner + ")";
    }
    return s;
}

std::vector<bool> evaluate_reduction(const ReductionTree& tree, const std::vector<int>& x) {
    const int m = tree.factor_count();
    if (static_cast<int>(x.size()) < m + 1)
        throw Error(Errc::invalid_input, "reduction: assignment must cover X_1..X_" + std::to_string(m));
    for (int k = 1; k <= m; ++k)
        if (x[k] != 0 && x[k] != 1) throw Error(Errc::invalid_input, "reduction: X_" + std::to_string(k) + " not binary");
    std::vector<bool> out;
    for (int j = 1; j <= tree.n; ++j) {
        int active = 0;
        bool value = false;
        for (const XTerm& t : tree.z[j - 1]) {
            bool on = true;
            for (const auto& [node, want] : t.path) on = on && (x[node] == 1) == want;
            if (on) {
                ++active;
                value = x[t.leaf] == 1;
            }
        }
        if (active != 1) throw Error(Errc::degenerate, "reduction: Z_" + std::to_string(j) + " has no single active term");
        out.push_back(value);
    }
    return out;
}

void JointDistribution::validate() const {
    if (n < 1 || n > 24) throw Error(Errc::invalid_input, "joint distribution: need 1 <= n <= 24");
    if (q.size() != (std::size_t{1} << n)) throw Error(Errc::invalid_input, "joint distribution: need 2^n entries");
    double s = 0.0;
    for (double v : q) {
        if (!(v >= 0.0)) throw Error(Errc::invalid_input, "joint distribution: negative probability");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error(Errc::invalid_input, "joint distribution: probabilities must sum to 1");
}

std::string JointDistribution::label(int n, std::size_t pattern) {
    std::string s;
    for (int j = 1; j <= n; ++j) {
        if (j > 1) s += " ";
        s += ((pattern >> (j - 1)) & 1 ? "z" : "~z") + std::to_string(j);
    }
    return s;
}

std::vector<double> x_probs_from_joint(const JointDistribution& joint) {
    joint.validate();
    const int n = joint.n;
    // mass[j][prefix] for prefixes over Z_1..Z_j
    std::vector<std::vector<double>> mass(n + 1);
    mass[n] = joint.q;
    for (int j = n; j >= 1; --j) {
        const std::size_t half = std::size_t{1} << (j - 1);
        mass[j - 1].assign(half, 0.0);
        for (std::size_t pre = 0; pre < half; ++pre) mass[j - 1][pre] = mass[j][pre] + mass[j][pre | half];
    }
    std::vector<double> p(std::size_t{1} << n, 0.0);
    for (int j = 1; j <= n; ++j) {
        const std::size_t half = std::size_t{1} << (j - 1);
        for (std::size_t pre = 0; pre < half; ++pre) {
            std::size_t node = 1;
            for (int i = 1; i < j; ++i) node = 2 * node + (((pre >> (i - 1)) & 1) ? 0 : 1);
            const double den = mass[j - 1][pre];
            if (!(den > 0.0)) {
                std::string cond = j == 1 ? "nothing" : JointDistribution::label(j - 1, pre);
                throw Error(Errc::degenerate, "node X_" + std::to_string(node) + ": zero probability mass conditioning Z_" +
                                                  std::to_string(j) + " on " + cond);
            }
            p[node] = std::min(1.0, mass[j][pre | half] / den);
        }
    }
    return p;
}

JointDistribution joint_from_x_probs(int n, const std::vector<double>& p) {
    if (n < 1 || n > 24) throw Error(Errc::invalid_input, "joint distribution: need 1 <= n <= 24");
    if (p.size() < (std::size_t{1} << n)) throw Error(Errc::invalid_input, "x probabilities: need entries 1..2^n-1");
    for (std::size_t k = 1; k < (std::size_t{1} << n); ++k)
        if (!(p[k] >= 0.0 && p[k] <= 1.0))
            throw Error(Errc::invalid_input, "x probabilities: p_X" + std::to_string(k) + " outside [0,1]");
    JointDistribution j;
    j.n = n;
    j.q.assign(std::size_t{1} << n, 0.0);
    for (std::size_t pat = 0; pat < j.q.size(); ++pat) {
        double v = 1.0;
        std::size_t node = 1;
        for (int i = 1; i <= n; ++i) {
            const bool z = (pat >> (i - 1)) & 1;
            v *= z ? p[node] : 1.0 - p[node];
            node = 2 * node + (z ? 0 : 1);
        }
        j.q[pat] = v;
    }
    return j;
}

std::vector<std::uint64_t> sample_patterns(const ReductionTree& tree, const std::vector<double>& p,
                                           std::size_t samples, std::uint64_t seed) {
    const int m = tree.factor_count();
    if (static_cast<int>(p.size()) < m + 1) throw Error(Errc::invalid_input, "sampling: need p_X for every node");
    std::vector<std::uint64_t> counts(std::size_t{1} << tree.n, 0);
    std::mutex mu;
    // each sample has its own stream, so counts do not depend on the thread count
    parallel_for(samples, [&](std::size_t b, std::size_t e) {
        std::vector<std::uint64_t> local(std::size_t{1} << tree.n, 0);
        std::vector<int> x(m + 1, 0);
        for (std::size_t s = b; s < e; ++s) {
            Stream st(seed, s, 11);
            for (int k = 1; k <= m; ++k) x[k] = st.uniform() < p[k] ? 1 : 0;
            const auto z = evaluate_reduction(tree, x);
            std::size_t pat = 0;
            for (int j = 0; j < tree.n; ++j) pat |= std::size_t{z[j]} << j;
            ++local[pat];
        }
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t i = 0; i < local.size(); ++i) counts[i] += local[i];
    });
    return counts;
}

} // namespace infoflow
