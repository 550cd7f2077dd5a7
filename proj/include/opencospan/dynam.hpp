#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cospan.hpp"
#include "expr.hpp"

namespace opencospan {

namespace detail {

// Sum that elides literal-zero operands so pushed-forward fields stay readable.
inline Expr addExpr(const Expr& a, const Expr& b) {
    auto isZero = [](const Expr& e) {
        return e.kind() == Expr::Kind::Constant && e.constantValue() == 0.0;
    };
    if (isZero(a)) return b;
    if (isZero(b)) return a;
    return a + b;
}

inline std::map<std::string, double> mergeParams(const std::map<std::string, double>& a,
                                                 const std::map<std::string, double>& b) {
    auto out = a;
    for (const auto& [k, v] : b) {
        auto [it, inserted] = out.emplace(k, v);
        if (!inserted && it->second != v)
            throw TypeMismatch("conflicting bindings for parameter " + k);
    }
    return out;
}

} // namespace detail

// A symbolic vector field on R^scope: one expression per scope element, closed
// over a parameter binding map. Parameter names may not shadow scope labels.
struct VectorField {
    FinSet scope;
    std::map<std::string, Expr> components;
    std::map<std::string, double> params;

    VectorField() = default;
    VectorField(FinSet scope_, std::map<std::string, Expr> components_,
                std::map<std::string, double> params_ = {})
        : scope(std::move(scope_)), components(std::move(components_)),
          params(std::move(params_)) {
        if (static_cast<int>(components.size()) != scope.size())
            throw TypeMismatch("vector field needs exactly one component per scope element");
        std::set<std::string> allowed;
        for (int i = 0; i < scope.size(); ++i) {
            if (!components.count(scope.label(i)))
                throw TypeMismatch("missing component for " + scope.label(i));
            allowed.insert(scope.label(i));
        }
        for (const auto& [k, v] : params) {
            (void)v;
            if (allowed.count(k))
                throw TypeMismatch("parameter " + k + " shadows a scope label");
            allowed.insert(k);
        }
        for (const auto& [l, e] : components)
            for (const auto& v : e.variables())
                if (!allowed.count(v))
                    throw TypeMismatch("component for " + l + " uses undeclared symbol " + v);
    }

    static VectorField zero(const FinSet& scope) {
        std::map<std::string, Expr> comps;
        for (int i = 0; i < scope.size(); ++i) comps[scope.label(i)] = Expr::zero();
        return VectorField(scope, std::move(comps));
    }
};

inline std::map<std::string, double> evalField(const VectorField& v,
                                               const std::map<std::string, double>& x,
                                               double t = 0.0) {
    std::map<std::string, double> bind = v.params;
    for (const auto& [k, val] : x) bind[k] = val;
    std::map<std::string, double> out;
    for (int i = 0; i < v.scope.size(); ++i) {
        const std::string& l = v.scope.label(i);
        out[l] = v.components.at(l).eval(bind, t);
    }
    return out;
}

// Scope-ordered evaluation used by the numeric layer.
inline std::vector<double> evalFieldVec(const VectorField& v, const std::vector<double>& x,
                                        double t = 0.0) {
    if (static_cast<int>(x.size()) != v.scope.size())
        throw ShapeMismatch("state vector length differs from scope size");
    std::map<std::string, double> bind = v.params;
    for (int i = 0; i < v.scope.size(); ++i) bind[v.scope.label(i)] = x[i];
    std::vector<double> out(v.scope.size());
    for (int i = 0; i < v.scope.size(); ++i)
        out[i] = v.components.at(v.scope.label(i)).eval(bind, t);
    return out;
}

// D(f): component at s' is the fiber sum of source components with variables
// renamed along f; empty fibers give the zero expression.
inline VectorField pushforwardField(const FinFunction& f, const VectorField& v) {
    if (f.dom() != v.scope)
        throw ScopeMismatch("pushforward requires f.dom = field scope");
    std::map<std::string, std::string> ren;
    for (int i = 0; i < f.dom().size(); ++i)
        ren[f.dom().label(i)] = f.cod().label(f.applyIndex(i));
    std::map<std::string, Expr> comps;
    for (int j = 0; j < f.cod().size(); ++j) comps[f.cod().label(j)] = Expr::zero();
    for (int i = 0; i < v.scope.size(); ++i) {
        const std::string& tgt = f.cod().label(f.applyIndex(i));
        comps[tgt] =
            detail::addExpr(comps.at(tgt), v.components.at(v.scope.label(i)).renameVariables(ren));
    }
    return VectorField(f.cod(), std::move(comps), v.params);
}

// The summing laxator: both fields pushed onto the tagged coproduct and added.
inline VectorField laxatorDynam(const VectorField& v, const VectorField& w) {
    CoproductResult cp = coproduct(v.scope, w.scope);
    VectorField lv = pushforwardField(cp.inl, v);
    VectorField rw = pushforwardField(cp.inr, w);
    std::map<std::string, Expr> comps;
    for (int i = 0; i < cp.set.size(); ++i) {
        const std::string& l = cp.set.label(i);
        comps[l] = detail::addExpr(lv.components.at(l), rw.components.at(l));
    }
    return VectorField(cp.set, std::move(comps),
                       detail::mergeParams(v.params, w.params));
}

// An open dynamical system: a cospan of finite sets whose apex carries a
// symbolic vector field.
struct OpenDynam {
    FinCospan cospan;
    VectorField field;

    OpenDynam(FinCospan cospan_, VectorField field_)
        : cospan(std::move(cospan_)), field(std::move(field_)) {
        if (field.scope != cospan.apex)
            throw TypeMismatch("field scope must equal the cospan apex");
    }
};

inline OpenDynam iotaDynam(const FinCospan& c) {
    return OpenDynam(c, VectorField::zero(c.apex));
}

// Composition along a shared foot: pushout of the inner legs; the composite
// field is the laxator pushed along the coproduct-to-pushout quotient, which
// adds the two contributions on every identified state variable.
inline OpenDynam composeOpenDynam(const OpenDynam& p, const OpenDynam& q) {
    if (p.cospan.right != q.cospan.left)
        throw FootMismatch("open system feet disagree at the shared boundary: " +
                           detail::describe(p.cospan.right) + " vs " +
                           detail::describe(q.cospan.left));
    PushoutResult po = pushout(p.cospan.outLeg, q.cospan.inLeg);
    FinCospan cospan(p.cospan.left, q.cospan.right, po.apex,
                     p.cospan.inLeg.then(po.leftInj), q.cospan.outLeg.then(po.rightInj));
    VectorField field = pushforwardField(po.quotient, laxatorDynam(p.field, q.field));
    return OpenDynam(std::move(cospan), std::move(field));
}

inline OpenDynam tensorOpenDynam(const OpenDynam& p, const OpenDynam& q) {
    return OpenDynam(tensorCospan(p.cospan, q.cospan), laxatorDynam(p.field, q.field));
}

// Residual of the open-system equation dx/dt = v(x) + i_*(I(t)) - o_*(O(t)):
// inflows enter with +, outflows with -, both pushed along the legs.
inline std::vector<double> openResidual(const OpenDynam& d, const std::vector<double>& x,
                                        const std::vector<double>& inflow,
                                        const std::vector<double>& outflow, double t = 0.0) {
    if (static_cast<int>(inflow.size()) != d.cospan.left.size())
        throw ShapeMismatch("inflow length differs from the left foot");
    if (static_cast<int>(outflow.size()) != d.cospan.right.size())
        throw ShapeMismatch("outflow length differs from the right foot");
    std::vector<double> r = evalFieldVec(d.field, x, t);
    for (int i = 0; i < d.cospan.left.size(); ++i)
        r[d.cospan.inLeg.applyIndex(i)] += inflow[i];
    for (int j = 0; j < d.cospan.right.size(); ++j)
        r[d.cospan.outLeg.applyIndex(j)] -= outflow[j];
    return r;
}

// Expr-in-t boundary flows, evaluated at time t with the field's parameters
// bound; expressions may not reference state variables.
inline std::vector<double> openResidual(const OpenDynam& d, const std::vector<double>& x,
                                        const std::vector<Expr>& inflow,
                                        const std::vector<Expr>& outflow, double t) {
    auto evalAt = [&](const std::vector<Expr>& es) {
        std::vector<double> out;
        out.reserve(es.size());
        for (const Expr& e : es) out.push_back(e.eval(d.field.params, t));
        return out;
    };
    return openResidual(d, x, evalAt(inflow), evalAt(outflow), t);
}

// Isomorphism of open dynamical systems over identical feet: a leg-compatible
// state bijection carrying one field to the other up to symbolic equality.
inline std::optional<FinFunction> isoOpenDynam(const OpenDynam& p, const OpenDynam& q) {
    if (p.cospan.left != q.cospan.left || p.cospan.right != q.cospan.right)
        return std::nullopt;
    if (p.cospan.apex.size() != q.cospan.apex.size()) return std::nullopt;
    const int n = p.cospan.apex.size();
    std::vector<int> target(n, -1), taken(n, 0);
    auto force = [&](int x, int y) {
        if (target[x] == -1) {
            if (taken[y]) return false;
            target[x] = y;
            taken[y] = 1;
            return true;
        }
        return target[x] == y;
    };
    for (int l = 0; l < p.cospan.left.size(); ++l)
        if (!force(p.cospan.inLeg.applyIndex(l), q.cospan.inLeg.applyIndex(l)))
            return std::nullopt;
    for (int r = 0; r < p.cospan.right.size(); ++r)
        if (!force(p.cospan.outLeg.applyIndex(r), q.cospan.outLeg.applyIndex(r)))
            return std::nullopt;
    std::vector<int> freeIdx;
    for (int i = 0; i < n; ++i)
        if (target[i] == -1) freeIdx.push_back(i);

    auto fieldsMatch = [&]() {
        if (p.field.params.size() != q.field.params.size()) return false;
        for (const auto& [k, v] : p.field.params) {
            auto it = q.field.params.find(k);
            if (it == q.field.params.end() || std::abs(it->second - v) > 1e-12) return false;
        }
        FinFunction sigma(p.cospan.apex, q.cospan.apex, target);
        VectorField moved;
        try {
            moved = pushforwardField(sigma, p.field);
        } catch (const TypeMismatch&) {
            return false; // a parameter shadows a relabeled state variable
        }
        for (int j = 0; j < q.cospan.apex.size(); ++j) {
            const std::string& l = q.cospan.apex.label(j);
            if (!equalExpr(moved.components.at(l), q.field.components.at(l))) return false;
        }
        return true;
    };
    std::optional<FinFunction> found;
    std::function<bool(size_t)> search = [&](size_t i) -> bool {
        if (i == freeIdx.size()) {
            if (fieldsMatch()) {
                found = FinFunction(p.cospan.apex, q.cospan.apex, target);
                return true;
            }
            return false;
        }
        for (int y = 0; y < n; ++y) {
            if (taken[y]) continue;
            target[freeIdx[i]] = y;
            taken[y] = 1;
            if (search(i + 1)) return true;
            target[freeIdx[i]] = -1;
            taken[y] = 0;
        }
        return false;
    };
    search(0);
    return found;
}

} // namespace opencospan
