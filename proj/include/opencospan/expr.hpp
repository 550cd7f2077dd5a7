#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace opencospan {

namespace detail {

inline bool identStart(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
inline bool identCont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

// Labels that scan as identifiers print bare; anything else is bracket-quoted.
inline bool isIdentifier(const std::string& s) {
    if (s.empty() || !identStart(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!identCont(static_cast<unsigned char>(c))) return false;
    return true;
}

inline std::string printLabel(const std::string& s) {
    return isIdentifier(s) ? s : "[" + s + "]";
}

inline std::string printReal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

// Immutable arithmetic expression tree: constants, named variables, the time
// symbol, negation, +, -, *, /, and natural powers. Shared subtrees are safe
// across threads; all operations build fresh nodes.
class Expr {
public:
    enum class Kind { Constant, Variable, Time, Neg, Add, Sub, Mul, Div, Pow };

private:
    struct Node {
        Kind kind;
        double value = 0.0;            // Constant
        std::string name;              // Variable
        std::shared_ptr<const Node> a; // unary/left child
        std::shared_ptr<const Node> b; // right child
        int exponent = 0;              // Pow
    };
    std::shared_ptr<const Node> node_;

    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }

public:
    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v) {
        auto n = make(Kind::Constant);
        n->value = v;
        return Expr(std::move(n));
    }
    static Expr variable(std::string name) {
        auto n = make(Kind::Variable);
        n->name = std::move(name);
        return Expr(std::move(n));
    }
    static Expr time() { return Expr(make(Kind::Time)); }
    static Expr zero() { return constant(0.0); }

    Kind kind() const { return node_->kind; }
    double constantValue() const { return node_->value; }
    const std::string& variableName() const { return node_->name; }
    int exponent() const { return node_->exponent; }
    Expr left() const { return Expr(node_->a); }
    Expr right() const { return Expr(node_->b); }

    friend Expr operator-(const Expr& e) {
        auto n = make(Kind::Neg);
        n->a = e.node_;
        return Expr(std::move(n));
    }
    friend Expr operator+(const Expr& x, const Expr& y) { return binary(Kind::Add, x, y); }
    friend Expr operator-(const Expr& x, const Expr& y) { return binary(Kind::Sub, x, y); }
    friend Expr operator*(const Expr& x, const Expr& y) { return binary(Kind::Mul, x, y); }
    friend Expr operator/(const Expr& x, const Expr& y) {
        if (y.kind() == Kind::Constant && y.constantValue() == 0.0)
            throw DivisionByZero("division by the zero constant");
        return binary(Kind::Div, x, y);
    }
    friend Expr pow(const Expr& x, int n) {
        if (n < 0) throw TypeMismatch("power exponent must be a natural number");
        auto node = make(Kind::Pow);
        node->a = x.node_;
        node->exponent = n;
        return Expr(std::move(node));
    }

    double eval(const std::map<std::string, double>& vars, double t = 0.0) const {
        return evalNode(node_.get(), vars, t);
    }

    // Renames variables: keys present in m are replaced, others kept.
    Expr renameVariables(const std::map<std::string, std::string>& m) const {
        return Expr(renameNode(node_.get(), m));
    }

    void collectVariables(std::set<std::string>& out) const { varsNode(node_.get(), out); }
    std::set<std::string> variables() const {
        std::set<std::string> out;
        collectVariables(out);
        return out;
    }
    bool usesTime() const { return timeNode(node_.get()); }

    std::string str() const { return printNode(node_.get(), 0); }

private:
    static Expr binary(Kind k, const Expr& x, const Expr& y) {
        auto n = make(k);
        n->a = x.node_;
        n->b = y.node_;
        return Expr(std::move(n));
    }

    static double evalNode(const Node* n, const std::map<std::string, double>& vars, double t) {
        switch (n->kind) {
        case Kind::Constant: return n->value;
        case Kind::Variable: {
            auto it = vars.find(n->name);
            if (it == vars.end()) throw UnboundVariable("unbound variable: " + n->name);
            return it->second;
        }
        case Kind::Time: return t;
        case Kind::Neg: return -evalNode(n->a.get(), vars, t);
        case Kind::Add: return evalNode(n->a.get(), vars, t) + evalNode(n->b.get(), vars, t);
        case Kind::Sub: return evalNode(n->a.get(), vars, t) - evalNode(n->b.get(), vars, t);
        case Kind::Mul: return evalNode(n->a.get(), vars, t) * evalNode(n->b.get(), vars, t);
        case Kind::Div: {
            double den = evalNode(n->b.get(), vars, t);
            if (den == 0.0) throw DivisionByZero("division by zero at evaluation");
            return evalNode(n->a.get(), vars, t) / den;
        }
        case Kind::Pow: return std::pow(evalNode(n->a.get(), vars, t), n->exponent);
        }
        throw Error("Expr", "corrupt expression node");
    }

    static std::shared_ptr<const Node>
    renameNode(const Node* n, const std::map<std::string, std::string>& m) {
        auto out = std::make_shared<Node>(*n);
        if (n->kind == Kind::Variable) {
            auto it = m.find(n->name);
            if (it != m.end()) out->name = it->second;
            return out;
        }
        if (n->a) out->a = renameNode(n->a.get(), m);
        if (n->b) out->b = renameNode(n->b.get(), m);
        return out;
    }

    static void varsNode(const Node* n, std::set<std::string>& out) {
        if (n->kind == Kind::Variable) out.insert(n->name);
        if (n->a) varsNode(n->a.get(), out);
        if (n->b) varsNode(n->b.get(), out);
    }

    static bool timeNode(const Node* n) {
        if (n->kind == Kind::Time) return true;
        return (n->a && timeNode(n->a.get())) || (n->b && timeNode(n->b.get()));
    }

    // Precedence: additive 1, multiplicative and unary minus 2, power 3, atoms 4.
    // A negative constant prints with a leading "-", which reparses as a
    // negation, so it must parenthesize exactly where a negation would.
    static int prec(const Node* n) {
        switch (n->kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div:
        case Kind::Neg: return 2;
        case Kind::Pow: return 3;
        case Kind::Constant: return n->value < 0.0 ? 2 : 4;
        default: return 4;
        }
    }

    static std::string printNode(const Node* n, int parent) {
        std::string s;
        switch (n->kind) {
        case Kind::Constant: s = detail::printReal(n->value); break;
        case Kind::Variable: s = detail::printLabel(n->name); break;
        case Kind::Time: s = "t"; break;
        case Kind::Neg: s = "-" + printNode(n->a.get(), 2); break;
        case Kind::Add: {
            const Node* r = n->b.get();
            if (r->kind == Kind::Neg)
                s = printNode(n->a.get(), 1) + " - " + printNode(r->a.get(), 2);
            else if (r->kind == Kind::Constant && r->value < 0.0)
                s = printNode(n->a.get(), 1) + " - " + detail::printReal(-r->value);
            else
                s = printNode(n->a.get(), 1) + " + " + printNode(r, 1);
            break;
        }
        case Kind::Sub: {
            const Node* r = n->b.get();
            std::string rs = printNode(r, 2);
            if (r->kind == Kind::Neg || (r->kind == Kind::Constant && r->value < 0.0))
                rs = "(" + rs + ")";
            s = printNode(n->a.get(), 1) + " - " + rs;
            break;
        }
        case Kind::Mul: s = printNode(n->a.get(), 2) + "*" + printNode(n->b.get(), 3); break;
        case Kind::Div: s = printNode(n->a.get(), 2) + "/" + printNode(n->b.get(), 3); break;
        case Kind::Pow:
            s = printNode(n->a.get(), 4) + "^" + std::to_string(n->exponent);
            break;
        }
        if (prec(n) < parent) s = "(" + s + ")";
        return s;
    }
};

// Recursive-descent parser for the infix syntax emitted by Expr::str and
// Poly::str. "t" reads as the time symbol unless it appears in `declared`;
// bracket-quoted [labels] admit arbitrary label text.
class ExprParser {
public:
    ExprParser(std::string text, std::set<std::string> declared)
        : text_(std::move(text)), declared_(std::move(declared)) {}

    Expr parse() {
        Expr e = expression();
        skipSpace();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string text_;
    std::set<std::string> declared_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError(what + " at position " + std::to_string(pos_) + " in \"" + text_ +
                         "\"");
    }

    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skipSpace();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skipSpace();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr expression() {
        Expr e = term();
        for (;;) {
            if (eat('+')) e = e + term();
            else if (eat('-')) e = e - term();
            else return e;
        }
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (eat('*')) e = e * factor();
            else if (eat('/')) e = e / factor();
            else return e;
        }
    }

    Expr factor() {
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (eat('^')) return pow(base, natural());
        return base;
    }

    int natural() {
        skipSpace();
        size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected a natural-number exponent");
        try {
            return std::stoi(text_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            fail("exponent out of range");
        }
    }

    Expr atom() {
        skipSpace();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (c == '[') {
            size_t close = text_.find(']', pos_ + 1);
            if (close == std::string::npos) fail("unterminated '[' label");
            std::string name = text_.substr(pos_ + 1, close - pos_ - 1);
            if (name.empty()) fail("empty '[]' label");
            pos_ = close + 1;
            return Expr::variable(name);
        }
        if (detail::identStart(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   detail::identCont(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            std::string name = text_.substr(start, pos_ - start);
            if (name == "t" && !declared_.count("t")) return Expr::time();
            return Expr::variable(name);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<size_t>(end - begin);
            return Expr::constant(v);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

inline Expr parseExpr(const std::string& text, const std::set<std::string>& declared = {}) {
    return ExprParser(text, declared).parse();
}

// ---------------------------------------------------------------------------
// Multivariate polynomial canonical form.

// A polynomial indeterminate: either a named variable or the time symbol.
// Variables order by name; time sorts after every variable.
struct VarKey {
    bool isTime = false;
    std::string name;

    friend bool operator==(const VarKey& a, const VarKey& b) {
        return a.isTime == b.isTime && a.name == b.name;
    }
    friend bool operator!=(const VarKey& a, const VarKey& b) { return !(a == b); }
    friend bool operator<(const VarKey& a, const VarKey& b) {
        return std::tie(a.isTime, a.name) < std::tie(b.isTime, b.name);
    }
};

// Monomial = sorted (indeterminate, positive exponent) pairs; empty = constant.
using Monomial = std::vector<std::pair<VarKey, int>>;

// Canonical display order: compare element-wise (indeterminate ascending, then
// higher exponent first); a monomial extending a common prefix sorts before the
// shorter one, so the constant term comes last.
struct MonomialLess {
    bool operator()(const Monomial& x, const Monomial& y) const {
        size_t n = std::min(x.size(), y.size());
        for (size_t i = 0; i < n; ++i) {
            if (x[i].first != y[i].first) return x[i].first < y[i].first;
            if (x[i].second != y[i].second) return x[i].second > y[i].second;
        }
        return x.size() > y.size();
    }
};

class Poly {
public:
    Poly() = default;

    static Poly constant(double v) {
        Poly p;
        p.add(Monomial{}, v);
        return p;
    }
    static Poly variable(const std::string& name) {
        Poly p;
        p.add(Monomial{{VarKey{false, name}, 1}}, 1.0);
        return p;
    }
    static Poly timeSymbol() {
        Poly p;
        p.add(Monomial{{VarKey{true, "t"}, 1}}, 1.0);
        return p;
    }

    const std::map<Monomial, double, MonomialLess>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }

    // The constant value if the polynomial has no indeterminates.
    std::optional<double> asConstant() const {
        if (terms_.empty()) return 0.0;
        if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
        return std::nullopt;
    }

    void add(const Monomial& m, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& x, const Poly& y) {
        Poly r = x;
        for (const auto& [m, c] : y.terms_) r.add(m, c);
        return r;
    }
    friend Poly operator-(const Poly& x, const Poly& y) {
        Poly r = x;
        for (const auto& [m, c] : y.terms_) r.add(m, -c);
        return r;
    }
    friend Poly operator-(const Poly& x) { return Poly() - x; }
    friend Poly operator*(const Poly& x, const Poly& y) {
        Poly r;
        for (const auto& [mx, cx] : x.terms_)
            for (const auto& [my, cy] : y.terms_) r.add(mulMonomials(mx, my), cx * cy);
        return r;
    }
    Poly scaled(double k) const {
        Poly r;
        for (const auto& [m, c] : terms_) r.add(m, c * k);
        return r;
    }
    Poly powed(int n) const {
        Poly r = Poly::constant(1.0);
        for (int i = 0; i < n; ++i) r = r * *this;
        return r;
    }

    bool approxEqual(const Poly& other, double tol) const {
        Poly diff = *this - other;
        for (const auto& [m, c] : diff.terms_)
            if (std::abs(c) > tol) return false;
        return true;
    }

    // Canonical form of an expression, or nullopt outside the polynomial
    // fragment (division is admitted only by nonzero constants).
    static std::optional<Poly> fromExpr(const Expr& e) {
        using K = Expr::Kind;
        switch (e.kind()) {
        case K::Constant: return Poly::constant(e.constantValue());
        case K::Variable: return Poly::variable(e.variableName());
        case K::Time: return Poly::timeSymbol();
        case K::Neg: {
            auto a = fromExpr(e.left());
            if (!a) return std::nullopt;
            return -*a;
        }
        case K::Add:
        case K::Sub:
        case K::Mul: {
            auto a = fromExpr(e.left());
            auto b = fromExpr(e.right());
            if (!a || !b) return std::nullopt;
            if (e.kind() == K::Add) return *a + *b;
            if (e.kind() == K::Sub) return *a - *b;
            return *a * *b;
        }
        case K::Div: {
            auto a = fromExpr(e.left());
            auto b = fromExpr(e.right());
            if (!a || !b) return std::nullopt;
            auto den = b->asConstant();
            if (!den || *den == 0.0) return std::nullopt;
            return a->scaled(1.0 / *den);
        }
        case K::Pow: {
            auto a = fromExpr(e.left());
            if (!a) return std::nullopt;
            return a->powed(e.exponent());
        }
        }
        return std::nullopt;
    }

    Expr toExpr() const {
        if (terms_.empty()) return Expr::zero();
        std::optional<Expr> acc;
        for (const auto& [m, c] : terms_) {
            Expr term = termExpr(m, c);
            acc = acc ? *acc + term : term;
        }
        return *acc;
    }

    // Canonical text: terms in display order, coefficients %.12g, unit
    // coefficients elided against nonempty monomials.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            double mag = std::abs(c);
            bool neg = c < 0.0;
            if (first) {
                if (neg) out += "-";
                first = false;
            } else {
                out += neg ? " - " : " + ";
            }
            std::string vars;
            for (const auto& [v, e] : m) {
                if (!vars.empty()) vars += "*";
                vars += v.isTime ? "t" : detail::printLabel(v.name);
                if (e > 1) vars += "^" + std::to_string(e);
            }
            if (vars.empty()) {
                out += detail::printReal(mag);
            } else if (mag == 1.0) {
                out += vars;
            } else {
                out += detail::printReal(mag) + "*" + vars;
            }
        }
        return out;
    }

private:
    std::map<Monomial, double, MonomialLess> terms_;

    static Monomial mulMonomials(const Monomial& a, const Monomial& b) {
        Monomial r;
        size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
            else if (i == a.size() || b[j].first < a[i].first) r.push_back(b[j++]);
            else {
                r.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i;
                ++j;
            }
        }
        return r;
    }

    // Left-associated with the coefficient first, so printing needs no parens.
    static Expr termExpr(const Monomial& m, double c) {
        if (m.empty()) return Expr::constant(c);
        std::optional<Expr> acc;
        if (c != 1.0 && c != -1.0) acc = Expr::constant(std::abs(c));
        for (const auto& [v, e] : m) {
            Expr base = v.isTime ? Expr::time() : Expr::variable(v.name);
            Expr p = e == 1 ? base : pow(base, e);
            acc = acc ? *acc * p : p;
        }
        return c < 0.0 ? -*acc : *acc;
    }
};

// Semi-decidable expression equality: canonical polynomial comparison on the
// polynomial fragment, otherwise agreement at 50 seeded random points drawn
// uniformly from [-2,2] per free symbol.
inline bool equalExpr(const Expr& a, const Expr& b, double polyTol = 1e-12,
                      double pointTol = 1e-10) {
    auto pa = Poly::fromExpr(a);
    auto pb = Poly::fromExpr(b);
    if (pa && pb) return pa->approxEqual(*pb, polyTol);

    std::set<std::string> vars = a.variables();
    b.collectVariables(vars);
    std::mt19937 rng(0x5eed0c0d);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int valid = 0, attempts = 0;
    while (valid < 50 && attempts < 500) {
        ++attempts;
        std::map<std::string, double> point;
        for (const auto& v : vars) point[v] = dist(rng);
        double t = dist(rng);
        double va, vb;
        try {
            va = a.eval(point, t);
            vb = b.eval(point, t);
        } catch (const DivisionByZero&) {
            continue; // resample away from poles
        }
        if (!std::isfinite(va) || !std::isfinite(vb)) continue;
        if (std::abs(va - vb) > pointTol) return false;
        ++valid;
    }
    return valid > 0;
}

} // namespace opencospan
