#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace infoflow {

// (variable index, power) pairs sorted by index; the empty monomial is the constant.
using Monomial = std::vector<std::pair<int, int>>;
using Poly = std::map<Monomial, double>;

Poly poly_mul(const Poly& a, const Poly& b);

// Payout expression over factor ids. Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' integer)?
//   atom   := number | id | '(' expr ')' | max(expr, expr) | min(expr, expr) | ind(expr)
// ind(e) is 1 when e > 0 and 0 otherwise.
class Expr {
public:
    struct Node;

    Expr() = default;
    static Expr parse(const std::string& text, const std::function<int(const std::string&)>& resolve);

    double eval(const std::vector<double>& x) const;
    // True when the expression expands to a finite polynomial in the factors.
    bool polynomial() const;
    Poly expand(std::size_t max_terms = 1u << 20) const;
    std::vector<int> vars() const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace infoflow
