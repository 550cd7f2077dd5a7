#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "petri.hpp"

namespace opencospan {

inline constexpr double kRateTolerance = 1e-12;

// Petri net with a nonnegative rate constant per transition.
struct RatedNet {
    PetriNet net;
    std::vector<double> rates;  // aligned with net.transitions

    RatedNet() = default;
    RatedNet(PetriNet n, std::vector<double> r) : net(std::move(n)), rates(std::move(r)) {
        if (static_cast<int>(rates.size()) != net.transitions.size())
            throw TypeMismatch("rates must be total on transitions");
        for (double x : rates)
            if (!(x >= 0)) throw TypeMismatch("rates must be nonnegative");
    }
};

struct RatedMorphism {
    PetriMorphism underlying;
};

// True iff the underlying squares commute and every target rate equals the sum
// of rates over its transition fiber.
inline bool checkRatedMorphism(const RatedMorphism& m, const RatedNet& p, const RatedNet& q) {
    if (!checkPetriMorphism(m.underlying, p.net, q.net)) return false;
    std::vector<double> fiberSum(q.net.transitions.size(), 0.0);
    for (int t = 0; t < p.net.transitions.size(); ++t)
        fiberSum[m.underlying.transMap.applyIndex(t)] += p.rates[t];
    for (int t = 0; t < q.net.transitions.size(); ++t)
        if (std::abs(fiberSum[t] - q.rates[t]) > kRateTolerance) return false;
    return true;
}

// Decorated cospan: interface cospan plus a rated net living on its apex.
struct OpenRatedNet {
    FinCospan cospan;
    RatedNet decoration;

    OpenRatedNet() = default;
    OpenRatedNet(FinCospan c, RatedNet d) : cospan(std::move(c)), decoration(std::move(d)) {
        if (decoration.net.places != cospan.apex)
            throw TypeMismatch("decoration places must equal the cospan apex");
    }
};

// Empty decoration: the transition-free rated net on the apex.
inline OpenRatedNet iotaRated(const FinCospan& c) {
    return OpenRatedNet(c, RatedNet(freeNet(c.apex), {}));
}

// Relabel species along h (the functor F on a tight morphism): arcs pushed
// forward with multiplicities summed, transitions and rates untouched.
inline RatedNet pushforwardRated(const FinFunction& h, const RatedNet& d) {
    if (h.dom() != d.net.places) throw ScopeMismatch("place map domain must be the species set");
    std::vector<Multiset> src, tgt;
    src.reserve(d.net.transitions.size());
    tgt.reserve(d.net.transitions.size());
    for (int t = 0; t < d.net.transitions.size(); ++t) {
        src.push_back(d.net.src[t].pushforward(h));
        tgt.push_back(d.net.tgt[t].pushforward(h));
    }
    return RatedNet(PetriNet(h.cod(), d.net.transitions, std::move(src), std::move(tgt)),
                    d.rates);
}

// Series composition: cospans compose by pushout; the composite decoration is
// the disjoint union of decorations relabeled along the quotient map, so
// transitions never merge and rates carry over unchanged.
inline OpenRatedNet composeOpenRated(const OpenRatedNet& p, const OpenRatedNet& q) {
    if (p.cospan.right != q.cospan.left)
        throw FootMismatch("open rated net feet disagree at the shared boundary: " +
                           detail::describe(p.cospan.right) + " vs " +
                           detail::describe(q.cospan.left));
    PushoutResult po = pushout(p.cospan.outLeg, q.cospan.inLeg);
    FinCospan cospan(p.cospan.left, q.cospan.right, po.apex,
                     p.cospan.inLeg.then(po.leftInj), q.cospan.outLeg.then(po.rightInj));
    FinSet transitions = detail::mergeDisjoint(p.decoration.net.transitions,
                                               q.decoration.net.transitions);
    std::vector<Multiset> src, tgt;
    std::vector<double> rates;
    for (int t = 0; t < p.decoration.net.transitions.size(); ++t) {
        src.push_back(p.decoration.net.src[t].pushforward(po.leftInj));
        tgt.push_back(p.decoration.net.tgt[t].pushforward(po.leftInj));
        rates.push_back(p.decoration.rates[t]);
    }
    for (int t = 0; t < q.decoration.net.transitions.size(); ++t) {
        src.push_back(q.decoration.net.src[t].pushforward(po.rightInj));
        tgt.push_back(q.decoration.net.tgt[t].pushforward(po.rightInj));
        rates.push_back(q.decoration.rates[t]);
    }
    RatedNet decoration(PetriNet(po.apex, std::move(transitions), std::move(src), std::move(tgt)),
                        std::move(rates));
    return OpenRatedNet(std::move(cospan), std::move(decoration));
}

// Parallel composition: disjoint union of cospans and decorations (the laxator).
inline OpenRatedNet tensorOpenRated(const OpenRatedNet& p, const OpenRatedNet& q) {
    FinCospan cospan = tensorCospan(p.cospan, q.cospan);
    CoproductResult places = coproduct(p.decoration.net.places, q.decoration.net.places);
    CoproductResult transitions =
        coproduct(p.decoration.net.transitions, q.decoration.net.transitions);
    std::vector<Multiset> src, tgt;
    std::vector<double> rates;
    for (int t = 0; t < p.decoration.net.transitions.size(); ++t) {
        src.push_back(p.decoration.net.src[t].pushforward(places.inl));
        tgt.push_back(p.decoration.net.tgt[t].pushforward(places.inl));
        rates.push_back(p.decoration.rates[t]);
    }
    for (int t = 0; t < q.decoration.net.transitions.size(); ++t) {
        src.push_back(q.decoration.net.src[t].pushforward(places.inr));
        tgt.push_back(q.decoration.net.tgt[t].pushforward(places.inr));
        rates.push_back(q.decoration.rates[t]);
    }
    RatedNet decoration(
        PetriNet(places.set, transitions.set, std::move(src), std::move(tgt)), std::move(rates));
    return OpenRatedNet(std::move(cospan), std::move(decoration));
}

// Decorated 2-cell: the cospan squares commute and decMor is a vertical rated
// morphism (identity place map) from the pushed-forward decoration F(h)(d) to
// the target decoration.
inline bool check2CellRated(const FinFunction& footL, const FinFunction& footR,
                            const FinFunction& h, const RatedMorphism& decMor,
                            const OpenRatedNet& p, const OpenRatedNet& q) {
    if (!checkCospanMap({p.cospan, q.cospan, footL, footR, h})) return false;
    if (decMor.underlying.placeMap != FinFunction::identity(q.cospan.apex))
        throw TypeMismatch("decoration morphism must be vertical (identity on species)");
    return checkRatedMorphism(decMor, pushforwardRated(h, p.decoration), q.decoration);
}

// Isomorphism of open rated nets over identical feet; rates must agree on
// matched transitions within kRateTolerance.
inline std::optional<std::pair<FinFunction, FinFunction>>
isoOpenRated(const OpenRatedNet& p, const OpenRatedNet& q) {
    OpenPetriNet up(p.cospan.left, p.cospan.right, p.decoration.net, p.cospan.inLeg,
                    p.cospan.outLeg);
    OpenPetriNet uq(q.cospan.left, q.cospan.right, q.decoration.net, q.cospan.inLeg,
                    q.cospan.outLeg);
    return detail::isoOpenNets(up, uq, &p.decoration.rates, &q.decoration.rates,
                               kRateTolerance);
}

} // namespace opencospan
