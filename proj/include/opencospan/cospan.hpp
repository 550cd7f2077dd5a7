#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "finset.hpp"

namespace opencospan {

// Cospan left -> apex <- right; the apex is the system, the feet its interfaces.
struct FinCospan {
    FinSet left, right, apex;
    FinFunction inLeg, outLeg;

    FinCospan() = default;
    FinCospan(FinSet l, FinSet r, FinSet a, FinFunction in, FinFunction out)
        : left(std::move(l)), right(std::move(r)), apex(std::move(a)),
          inLeg(std::move(in)), outLeg(std::move(out)) {
        if (inLeg.dom() != left || inLeg.cod() != apex)
            throw TypeMismatch("inLeg must map the left foot into the apex");
        if (outLeg.dom() != right || outLeg.cod() != apex)
            throw TypeMismatch("outLeg must map the right foot into the apex");
    }

    friend bool operator==(const FinCospan& p, const FinCospan& q) {
        return p.left == q.left && p.right == q.right && p.apex == q.apex &&
               p.inLeg == q.inLeg && p.outLeg == q.outLeg;
    }
};

inline FinCospan identityCospan(const FinSet& a) {
    return FinCospan(a, a, a, FinFunction::identity(a), FinFunction::identity(a));
}

inline FinCospan emptyCospan() { return identityCospan(FinSet{}); }

// Series composition by pushout over the shared middle foot.
inline FinCospan composeCospan(const FinCospan& p, const FinCospan& q) {
    if (p.right != q.left)
        throw FootMismatch("cospan feet disagree at the shared boundary: " +
                           detail::describe(p.right) + " vs " + detail::describe(q.left));
    PushoutResult po = pushout(p.outLeg, q.inLeg);
    return FinCospan(p.left, q.right, po.apex, p.inLeg.then(po.leftInj), q.outLeg.then(po.rightInj));
}

// Parallel composition: feet and apex are coproducts, legs act sidewise.
inline FinCospan tensorCospan(const FinCospan& p, const FinCospan& q) {
    CoproductResult apex = coproduct(p.apex, q.apex);
    FinFunction in = copair(p.inLeg.then(apex.inl), q.inLeg.then(apex.inr));
    FinFunction out = copair(p.outLeg.then(apex.inl), q.outLeg.then(apex.inr));
    return FinCospan(in.dom(), out.dom(), apex.set, in, out);
}

// Relabel the feet of a cospan along bijections bl: newLeft -> c.left,
// br: newRight -> c.right (transport along structural isomorphisms).
inline FinCospan transportFeet(const FinCospan& c, const FinFunction& bl, const FinFunction& br) {
    if (!bl.isBijection() || !br.isBijection())
        throw TypeMismatch("foot transport needs bijections");
    return FinCospan(bl.dom(), br.dom(), c.apex, bl.then(c.inLeg), br.then(c.outLeg));
}

// Apex bijection commuting with both legs, if one exists; feet must coincide.
// Leg images force part of the bijection; the rest is free and filled in stored order.
inline std::optional<FinFunction> isoCospan(const FinCospan& p, const FinCospan& q) {
    if (p.left != q.left || p.right != q.right) return std::nullopt;
    if (p.apex.size() != q.apex.size()) return std::nullopt;
    const int n = p.apex.size();
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
    for (int l = 0; l < p.left.size(); ++l)
        if (!force(p.inLeg.applyIndex(l), q.inLeg.applyIndex(l))) return std::nullopt;
    for (int r = 0; r < p.right.size(); ++r)
        if (!force(p.outLeg.applyIndex(r), q.outLeg.applyIndex(r))) return std::nullopt;
    int next = 0;
    for (int x = 0; x < n; ++x)
        if (target[x] == -1) {
            while (taken[next]) ++next;
            target[x] = next;
            taken[next] = 1;
        }
    return FinFunction(p.apex, q.apex, std::move(target));
}

// 2-cell candidate: foot maps plus an apex map between two cospans.
struct CospanMap {
    FinCospan src, dst;
    FinFunction footL, footR, apexMap;
};

// True iff both squares commute (and the maps are typed between src and dst).
inline bool checkCospanMap(const CospanMap& m) {
    if (m.footL.dom() != m.src.left || m.footL.cod() != m.dst.left ||
        m.footR.dom() != m.src.right || m.footR.cod() != m.dst.right ||
        m.apexMap.dom() != m.src.apex || m.apexMap.cod() != m.dst.apex)
        throw TypeMismatch("cospan map legs are not typed between src and dst");
    return m.src.inLeg.then(m.apexMap) == m.footL.then(m.dst.inLeg) &&
           m.src.outLeg.then(m.apexMap) == m.footR.then(m.dst.outLeg);
}

// Swap-wires cospan a+a -> a+a: apex a+a, inLeg the swap, outLeg the identity.
inline FinCospan symmetryCospan(const FinSet& a) {
    CoproductResult cp = coproduct(a, a);
    FinFunction swap = copair(FinFunction::identity(a).then(cp.inr),
                              FinFunction::identity(a).then(cp.inl));
    // copair's domain is a fresh coproduct with identical labels; retype onto cp.set
    FinFunction in = positionalBijection(cp.set, swap.dom()).then(swap);
    return FinCospan(cp.set, cp.set, cp.set, in, FinFunction::identity(cp.set));
}

struct FrobeniusGenerators {
    FinCospan mu;       // join wires:  a+a -> a <- a
    FinCospan eta;      // free wire:   0 -> a <- a
    FinCospan delta;    // split wire:  a -> a <- a+a
    FinCospan epsilon;  // end wire:    a -> a <- 0
    FinCospan cup;      // a+a -> a <- 0
    FinCospan cap;      // 0 -> a <- a+a
};

inline FrobeniusGenerators frobeniusGenerators(const FinSet& a) {
    FinSet none;
    FinFunction id = FinFunction::identity(a);
    FinFunction cd = codiagonal(a);
    const FinSet& aa = cd.dom();
    FrobeniusGenerators g;
    g.mu = FinCospan(aa, a, a, cd, id);
    g.eta = FinCospan(none, a, a, bang(a), id);
    g.delta = FinCospan(a, aa, a, id, cd);
    g.epsilon = FinCospan(a, none, a, id, bang(a));
    g.cup = FinCospan(aa, none, a, cd, bang(a));
    g.cap = FinCospan(none, aa, a, bang(a), cd);
    return g;
}

struct LawReport {
    std::vector<std::pair<std::string, bool>> laws;
    bool allHold = true;
};

// Verifies the special commutative Frobenius laws up to cospan isomorphism.
// Feet of the stated composites differ by coproduct associator/unitor relabelings,
// which are positionally the identity under the tagging scheme; composites are
// transported along them before the iso search. Throws LawViolation on failure.
inline LawReport checkFrobeniusLaws(const FinSet& a) {
    if (a.size() > 8) throw TypeMismatch("law check is bounded to feet of size <= 8");
    FrobeniusGenerators g = frobeniusGenerators(a);
    FinCospan id = identityCospan(a);
    const FinSet& aa = g.mu.left;

    LawReport report;
    auto record = [&](const std::string& name, bool ok) {
        report.laws.emplace_back(name, ok);
        report.allHold = report.allHold && ok;
    };
    auto iso = [](const FinCospan& p, const FinCospan& q) { return isoCospan(p, q).has_value(); };
    // Retype a cospan's feet onto structurally equal sets (associator/unitor moves).
    auto retype = [](const FinCospan& c, const FinSet& newLeft, const FinSet& newRight) {
        return transportFeet(c, positionalBijection(newLeft, c.left),
                             positionalBijection(newRight, c.right));
    };

    FinCospan muId = tensorCospan(g.mu, id);        // (a+a)+a -> a+a
    FinCospan idMu = tensorCospan(id, g.mu);        // a+(a+a) -> a+a
    const FinSet& aaa = muId.left;
    record("associativity", iso(composeCospan(muId, g.mu),
                                composeCospan(retype(idMu, aaa, idMu.right), g.mu)));

    FinCospan etaId = tensorCospan(g.eta, id);      // 0+a -> a+a
    FinCospan idEta = tensorCospan(id, g.eta);      // a+0 -> a+a
    record("left unit", iso(composeCospan(retype(etaId, a, etaId.right), g.mu), id));
    record("right unit", iso(composeCospan(retype(idEta, a, idEta.right), g.mu), id));

    record("commutativity", iso(composeCospan(symmetryCospan(a), g.mu), g.mu));

    FinCospan deltaId = tensorCospan(g.delta, id);  // a+a -> (a+a)+a
    FinCospan idDelta = tensorCospan(id, g.delta);  // a+a -> a+(a+a)
    FinCospan muThenDelta = composeCospan(g.mu, g.delta);
    record("frobenius left",
           iso(composeCospan(deltaId, retype(idMu, deltaId.right, aa)), muThenDelta));
    record("frobenius right",
           iso(composeCospan(idDelta, retype(muId, idDelta.right, aa)), muThenDelta));

    record("special", iso(composeCospan(g.delta, g.mu), id));

    FinCospan idCap = tensorCospan(id, g.cap);      // a+0 -> a+(a+a)
    FinCospan cupId = tensorCospan(g.cup, id);      // (a+a)+a -> 0+a
    record("zigzag left",
           iso(composeCospan(retype(idCap, a, aaa), retype(cupId, aaa, a)), id));

    FinCospan capId = tensorCospan(g.cap, id);      // 0+a -> (a+a)+a
    FinCospan idCup = tensorCospan(id, g.cup);      // a+(a+a) -> a+0
    record("zigzag right",
           iso(composeCospan(retype(capId, a, capId.right),
                             retype(idCup, capId.right, a)), id));

    if (!report.allHold) {
        std::string failed;
        for (const auto& [name, ok] : report.laws)
            if (!ok) failed += (failed.empty() ? "" : ", ") + name;
        throw LawViolation("failed: " + failed);
    }
    return report;
}

} // namespace opencospan
