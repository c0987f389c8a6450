#include "infoflow/lattice.hpp"

#include <cmath>

namespace infoflow {

namespace {

void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(Errc::invalid_input, "lattice: branch probability must lie in (0,1)");
}

} // namespace

Lattice Lattice::binomial(int depth, double q) {
    if (depth < 1 || depth > 30) throw Error(Errc::invalid_input, "lattice: binomial depth must lie in 1..30");
    check_q(q);
    Lattice L;
    for (int i = 0; i <= depth; ++i) {
        L.offset_.push_back(L.ups_.size());
        for (int k = 0; k <= i; ++k) {
            L.ups_.push_back(k);
            L.row_.push_back(L.child_.size());
            if (i < depth) {
                L.child_.push_back(k);
                L.prob_.push_back(1.0 - q);
                L.child_.push_back(k + 1);
                L.prob_.push_back(q);
            }
        }
    }
    L.finish();
    return L;
}

Lattice Lattice::binary_tree(int depth, double q) {
    if (depth < 1 || depth > 20) throw Error(Errc::invalid_input, "lattice: tree depth must lie in 1..20");
    check_q(q);
    Lattice L;
    for (int i = 0; i <= depth; ++i) {
        L.offset_.push_back(L.ups_.size());
        for (std::size_t k = 0; k < (std::size_t{1} << i); ++k) {
            L.ups_.push_back(__builtin_popcountll(k));
            L.parent_.push_back(static_cast<std::uint32_t>(k >> 1));
            L.row_.push_back(L.child_.size());
            if (i < depth) {
                L.child_.push_back(static_cast<std::uint32_t>(2 * k));
                L.prob_.push_back(1.0 - q);
                L.child_.push_back(static_cast<std::uint32_t>(2 * k + 1));
                L.prob_.push_back(q);
            }
        }
    }
    L.tree_ = true;
    L.finish();
    return L;
}

Lattice Lattice::one_period(const std::vector<double>& probs) {
    if (probs.size() < 2) throw Error(Errc::invalid_input, "lattice: need at least two branches");
    double s = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw Error(Errc::invalid_input, "lattice: branch probabilities must be positive");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw Error(Errc::invalid_input, "lattice: branch probabilities must sum to 1");
    Lattice L;
    L.offset_ = {0, 1};
    L.row_.push_back(0);
    L.ups_.push_back(0);
    L.parent_.push_back(0);
    for (std::size_t k = 0; k < probs.size(); ++k) {
        L.child_.push_back(static_cast<std::uint32_t>(k));
        L.prob_.push_back(probs[k]);
    }
    for (std::size_t k = 0; k < probs.size(); ++k) {
        L.row_.push_back(L.child_.size());
        L.ups_.push_back(static_cast<int>(k));
        L.parent_.push_back(0);
    }
    L.tree_ = true;
    L.finish();
    return L;
}

void Lattice::finish() {
    offset_.push_back(ups_.size());
    row_.push_back(child_.size());
}

Lattice::Edges Lattice::edges(int date, std::size_t k) const {
    const std::size_t g = offset_[date] + k;
    const std::size_t b = row_[g], e = row_[g + 1];
    return {std::span<const std::uint32_t>(child_.data() + b, e - b), std::span<const double>(prob_.data() + b, e - b)};
}

std::vector<double> Lattice::expect_next(const std::vector<double>& next, int date) const {
    if (date < 0 || date >= depth()) throw Error(Errc::invalid_input, "lattice: date outside the horizon");
    std::vector<double> out(size(date), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::size_t g = offset_[date] + k;
        double s = 0.0;
        for (std::size_t e = row_[g]; e < row_[g + 1]; ++e) s += prob_[e] * next[child_[e]];
        out[k] = s;
    }
    return out;
}

std::vector<double> Lattice::conditional(const std::vector<double>& fj, int i, int j) const {
    if (i > j || j > depth() || i < 0) throw Error(Errc::invalid_input, "lattice: need 0 <= i <= j <= depth");
    std::vector<double> f = fj;
    for (int d = j - 1; d >= i; --d) f = expect_next(f, d);
    return f;
}

std::size_t Lattice::parent(int date, std::size_t k) const {
    if (!tree_) throw Error(Errc::invalid_input, "lattice: nodes have several parents; a tree lattice is required");
    if (date == 0) throw Error(Errc::invalid_input, "lattice: the root has no parent");
    return parent_[offset_[date] + k];
}

int Lattice::ups(int date, std::size_t k) const { return ups_[offset_[date] + k]; }

NodeField Lattice::field(double v) const {
    NodeField f(depth() + 1);
    for (int i = 0; i <= depth(); ++i) f[i].assign(size(i), v);
    return f;
}

} // namespace infoflow
