#pragma once

#include "infoflow/common.hpp"
#include "infoflow/rng.hpp"

#include <map>
#include <string>

namespace infoflow {

// Reduction of n dependent binary Z-factors to 2^n - 1 independent binary
// X-factors on a binary tree. Node k has branch child 2k (taken when X_k = 1,
// so that Z takes its z-value) and co-branch child 2k+1.
struct XTerm {
    // Path from the root to the parent of the leaf: (node, true) for X_node,
    // (node, false) for the co-factor 1 - X_node.
    std::vector<std::pair<int, bool>> path;
    int leaf = 0; // contributes z_j X_leaf + zbar_j (1 - X_leaf)
};

struct ReductionTree {
    int n = 0;
    std::vector<std::vector<XTerm>> z; // z[j-1] holds the 2^(j-1) terms of Z_j

    int factor_count() const { return (1 << n) - 1; }
    // Text form, e.g. "Z_2=X_1(z_2 X_2+\bar{z}_2\bar{X}_2)+\bar{X}_1(z_2 X_3+\bar{z}_2\bar{X}_3)".
    std::string latex(int j) const;
    // Plain form, e.g. "Z2 = X1 (z2 X2 + ~z2 ~X2) + ~X1 (z2 X3 + ~z2 ~X3)".
    std::string plain(int j) const;
};

ReductionTree build_reduction(int n);

// x[k] holds X_k for k = 1..2^n-1 (x[0] is ignored). Returns, per Z_j, true
// for z_j and false for zbar_j, checking that exactly one X-term is active.
std::vector<bool> evaluate_reduction(const ReductionTree& tree, const std::vector<int>& x);

// Joint law of (Z_1..Z_n): index bit j-1 set means Z_j = z_j.
struct JointDistribution {
    int n = 0;
    std::vector<double> q; // size 2^n

    void validate() const;
    // Pattern label such as "z1 ~z2 z3".
    static std::string label(int n, std::size_t pattern);
};

// p[k] = P(X_k = 1) for k = 1..2^n-1; p[0] is unused.
std::vector<double> x_probs_from_joint(const JointDistribution& joint);
JointDistribution joint_from_x_probs(int n, const std::vector<double>& p);

// Draws independent X's, evaluates the reduction and returns pattern counts.
std::vector<std::uint64_t> sample_patterns(const ReductionTree& tree, const std::vector<double>& p,
                                           std::size_t samples, std::uint64_t seed);

} // namespace infoflow
