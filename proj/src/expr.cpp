#include "infoflow/expr.hpp"
#include "infoflow/common.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace infoflow {

struct Expr::Node {
    enum class Op { num, var, add, sub, mul, div, neg, pow, max, min, ind } op = Op::num;
    double value = 0.0;
    int var = -1;
    int power = 1;
    std::vector<std::shared_ptr<const Node>> kids;
};

namespace {

using NodeP = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodeP make(Op op, std::vector<NodeP> kids) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, const std::function<int(const std::string&)>& resolve) : s_(s), resolve_(resolve) {}

    NodeP run() {
        NodeP n = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(Errc::invalid_input, "expression '" + s_ + "' at position " + std::to_string(i_) + ": " + what);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    NodeP expr() {
        NodeP n = term();
        for (;;) {
            if (eat('+')) n = make(Op::add, {n, term()});
            else if (eat('-')) n = make(Op::sub, {n, term()});
            else return n;
        }
    }
    NodeP term() {
        NodeP n = unary();
        for (;;) {
            if (eat('*')) n = make(Op::mul, {n, unary()});
            else if (eat('/')) n = make(Op::div, {n, unary()});
            else return n;
        }
    }
    NodeP unary() {
        if (eat('-')) return make(Op::neg, {unary()});
        if (eat('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = atom();
        if (!eat('^')) return base;
        skip();
        std::size_t used = 0;
        int k = 0;
        try {
            k = std::stoi(s_.substr(i_), &used);
        } catch (...) {
            fail("exponent must be a non-negative integer");
        }
        if (k < 0) fail("exponent must be a non-negative integer");
        i_ += used;
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::pow;
        n->power = k;
        n->kids = {base};
        return n;
    }
    NodeP atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        const char c = s_[i_];
        if (c == '(') {
            ++i_;
            NodeP n = expr();
            expect(')');
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(i_), &used);
            } catch (...) {
                fail("bad number");
            }
            i_ += used;
            auto n = std::make_shared<Expr::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            const std::string id = s_.substr(i_, j - i_);
            i_ = j;
            if (id == "max" || id == "min") {
                expect('(');
                NodeP a = expr();
                expect(',');
                NodeP b = expr();
                expect(')');
                return make(id == "max" ? Op::max : Op::min, {a, b});
            }
            if (id == "ind") {
                expect('(');
                NodeP a = expr();
                expect(')');
                return make(Op::ind, {a});
            }
            const int v = resolve_(id);
            if (v < 0) fail("unknown factor '" + id + "'");
            auto n = std::make_shared<Expr::Node>();
            n->op = Op::var;
            n->var = v;
            return n;
        }
        fail("unexpected character");
    }

    const std::string& s_;
    const std::function<int(const std::string&)>& resolve_;
    std::size_t i_ = 0;
};

double eval_node(const Expr::Node& n, const std::vector<double>& x) {
    switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return x[n.var];
    case Op::add: return eval_node(*n.kids[0], x) + eval_node(*n.kids[1], x);
    case Op::sub: return eval_node(*n.kids[0], x) - eval_node(*n.kids[1], x);
    case Op::mul: return eval_node(*n.kids[0], x) * eval_node(*n.kids[1], x);
    case Op::div: return eval_node(*n.kids[0], x) / eval_node(*n.kids[1], x);
    case Op::neg: return -eval_node(*n.kids[0], x);
    case Op::pow: return std::pow(eval_node(*n.kids[0], x), n.power);
    case Op::max: return std::max(eval_node(*n.kids[0], x), eval_node(*n.kids[1], x));
    case Op::min: return std::min(eval_node(*n.kids[0], x), eval_node(*n.kids[1], x));
    case Op::ind: return eval_node(*n.kids[0], x) > 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

void add_into(Poly& a, const Poly& b, double sign) {
    for (const auto& [m, c] : b) a[m] += sign * c;
}

void prune(Poly& p) {
    for (auto it = p.begin(); it != p.end();)
        it = it->second == 0.0 ? p.erase(it) : std::next(it);
}

// nullopt-style: returns false when the node is not polynomial
bool expand_node(const Expr::Node& n, Poly& out, std::size_t cap) {
    Poly a, b;
    switch (n.op) {
    case Op::num: out = {{Monomial{}, n.value}}; return true;
    case Op::var: out = {{Monomial{{n.var, 1}}, 1.0}}; return true;
    case Op::add:
    case Op::sub:
        if (!expand_node(*n.kids[0], a, cap) || !expand_node(*n.kids[1], b, cap)) return false;
        add_into(a, b, n.op == Op::add ? 1.0 : -1.0);
        out = std::move(a);
        break;
    case Op::neg:
        if (!expand_node(*n.kids[0], out, cap)) return false;
        for (auto& kv : out) kv.second = -kv.second;
        break;
    case Op::mul:
        if (!expand_node(*n.kids[0], a, cap) || !expand_node(*n.kids[1], b, cap)) return false;
        if (a.size() * b.size() > cap) throw Error(Errc::unsupported, "payout expansion too large");
        out = poly_mul(a, b);
        break;
    case Op::div: {
        if (!expand_node(*n.kids[0], a, cap) || !expand_node(*n.kids[1], b, cap)) return false;
        prune(b);
        if (b.size() != 1 || !b.begin()->first.empty()) return false; // divisor must be a constant
        const double d = b.begin()->second;
        for (auto& kv : a) kv.second /= d;
        out = std::move(a);
        break;
    }
    case Op::pow: {
        if (!expand_node(*n.kids[0], a, cap)) return false;
        out = {{Monomial{}, 1.0}};
        for (int k = 0; k < n.power; ++k) {
            if (out.size() * a.size() > cap) throw Error(Errc::unsupported, "payout expansion too large");
            out = poly_mul(out, a);
        }
        break;
    }
    default: return false;
    }
    prune(out);
    if (out.size() > cap) throw Error(Errc::unsupported, "payout expansion too large");
    return true;
}

bool is_poly(const Expr::Node& n) {
    switch (n.op) {
    case Op::max:
    case Op::min:
    case Op::ind: return false;
    case Op::div: {
        if (!is_poly(*n.kids[0])) return false;
        // divisor must reduce to a constant
        Poly b;
        if (!expand_node(*n.kids[1], b, 1u << 20)) return false;
        prune(b);
        return b.size() == 1 && b.begin()->first.empty();
    }
    default:
        for (const auto& k : n.kids)
            if (!is_poly(*k)) return false;
        return true;
    }
}

void collect(const Expr::Node& n, std::set<int>& out) {
    if (n.op == Op::var) out.insert(n.var);
    for (const auto& k : n.kids) collect(*k, out);
}

} // namespace

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Monomial m;
            std::size_t i = 0, j = 0;
            while (i < ma.size() || j < mb.size()) {
                if (j == mb.size() || (i < ma.size() && ma[i].first < mb[j].first)) m.push_back(ma[i++]);
                else if (i == ma.size() || mb[j].first < ma[i].first) m.push_back(mb[j++]);
                else {
                    m.emplace_back(ma[i].first, ma[i].second + mb[j].second);
                    ++i, ++j;
                }
            }
            out[m] += ca * cb;
        }
    return out;
}

Expr Expr::parse(const std::string& text, const std::function<int(const std::string&)>& resolve) {
    Expr e;
    e.root_ = Parser(text, resolve).run();
    e.text_ = text;
    return e;
}

double Expr::eval(const std::vector<double>& x) const { return eval_node(*root_, x); }

bool Expr::polynomial() const { return is_poly(*root_); }

Poly Expr::expand(std::size_t max_terms) const {
    Poly p;
    if (!expand_node(*root_, p, max_terms)) throw Error(Errc::unsupported, "payout is not polynomial in the factors");
    return p;
}

std::vector<int> Expr::vars() const {
    std::set<int> s;
    collect(*root_, s);
    return {s.begin(), s.end()};
}

} // namespace infoflow
