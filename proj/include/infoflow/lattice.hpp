#pragma once

#include "infoflow/common.hpp"

#include <span>

namespace infoflow {

// Values per node: field[date][node].
using NodeField = std::vector<std::vector<double>>;

// Finite scenario lattice: nodes per date and weighted edges to the next date,
// stored in compressed rows.
class Lattice {
public:
    // Recombining binomial: node k at date i has seen k up-moves. Depth <= 30.
    static Lattice binomial(int depth, double q_up);
    // Full binary tree: node k at date i has children 2k (down) and 2k+1 (up). Depth <= 20.
    static Lattice binary_tree(int depth, double q_up);
    // One period with the given branch probabilities.
    static Lattice one_period(const std::vector<double>& probs);

    int depth() const { return static_cast<int>(offset_.size()) - 2; }
    std::size_t size(int date) const { return offset_[date + 1] - offset_[date]; }
    std::size_t nodes() const { return offset_.back(); }

    struct Edges {
        std::span<const std::uint32_t> child; // node index at the next date
        std::span<const double> prob;
    };
    Edges edges(int date, std::size_t k) const;

    // E[f_{date+1} | node] for every node at date.
    std::vector<double> expect_next(const std::vector<double>& next, int date) const;
    // E_i[f_j] as a field over date i.
    std::vector<double> conditional(const std::vector<double>& fj, int i, int j) const;

    // Unique parent of each node, or empty when some node has several parents.
    bool is_tree() const { return tree_; }
    std::size_t parent(int date, std::size_t k) const;
    // Number of up-moves leading to a node (binomial and tree lattices).
    int ups(int date, std::size_t k) const;

    NodeField field(double v = 0.0) const;

private:
    std::vector<std::size_t> offset_;      // first global id per date, plus end
    std::vector<std::size_t> row_;         // per global node, first edge
    std::vector<std::uint32_t> child_;     // local index at the next date
    std::vector<double> prob_;
    std::vector<std::uint32_t> parent_;    // per global node (tree lattices)
    std::vector<int> ups_;
    bool tree_ = false;

    void finish();
};

} // namespace infoflow
