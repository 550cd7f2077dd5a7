#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dynam.hpp"
#include "rates.hpp"

namespace opencospan {

namespace detail {

// Rate-constant parameter names: "r_<transition>", with "_" appended until the
// name clashes with neither a place label nor an earlier parameter.
inline std::string rateParamName(const FinSet& places, const std::set<std::string>& used,
                                 const std::string& transition) {
    std::string name = "r_" + transition;
    auto clashes = [&](const std::string& n) {
        if (used.count(n)) return true;
        for (int i = 0; i < places.size(); ++i)
            if (places.label(i) == n) return true;
        return false;
    };
    while (clashes(name)) name += "_";
    return name;
}

} // namespace detail

// The law of mass action: v(x) = Σ_τ r(τ)·(t(τ)−s(τ))·x^{s(τ)}, one polynomial
// component per place, emitted in canonical form with the rate constants as
// bound symbolic parameters.
inline VectorField massAction(const RatedNet& p) {
    const FinSet& places = p.net.places;
    std::vector<Poly> acc(places.size());
    std::map<std::string, double> params;
    std::set<std::string> used;
    for (int t = 0; t < p.net.transitions.size(); ++t) {
        std::string rname =
            detail::rateParamName(places, used, p.net.transitions.label(t));
        used.insert(rname);
        params[rname] = p.rates[t];
        Poly mono = Poly::variable(rname);
        for (const auto& [label, count] : p.net.src[t].counts())
            mono = mono * Poly::variable(label).powed(static_cast<int>(count));
        for (int i = 0; i < places.size(); ++i) {
            const std::string& l = places.label(i);
            long long delta = p.net.tgt[t].count(l) - p.net.src[t].count(l);
            if (delta != 0) acc[i] = acc[i] + mono.scaled(static_cast<double>(delta));
        }
    }
    std::map<std::string, Expr> comps;
    for (int i = 0; i < places.size(); ++i) comps[places.label(i)] = acc[i].toExpr();
    return VectorField(places, std::move(comps), std::move(params));
}

// Gray-boxing: keep the interface cospan, replace the rated net decorating the
// apex by its mass-action vector field.
inline OpenDynam grayBox(const OpenRatedNet& p) {
    return OpenDynam(p.cospan, massAction(p.decoration));
}

} // namespace opencospan
