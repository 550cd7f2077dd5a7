#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cospan.hpp"

namespace opencospan {

// Finite multiset of labels; canonical form stores only positive counts.
class Multiset {
public:
    Multiset() = default;
    explicit Multiset(std::map<std::string, long long> counts) {
        for (auto& [l, n] : counts) {
            if (n < 0) throw TypeMismatch("negative multiplicity for '" + l + "'");
            if (n > 0) counts_.emplace(l, n);
        }
    }

    long long count(const std::string& l) const {
        auto it = counts_.find(l);
        return it == counts_.end() ? 0 : it->second;
    }
    const std::map<std::string, long long>& counts() const { return counts_; }
    bool empty() const { return counts_.empty(); }
    long long total() const {
        long long t = 0;
        for (const auto& [l, n] : counts_) t += n;
        return t;
    }

    Multiset add(const Multiset& o) const {
        auto c = counts_;
        for (const auto& [l, n] : o.counts_) c[l] += n;
        return Multiset(std::move(c));
    }
    bool leq(const Multiset& o) const {
        for (const auto& [l, n] : counts_)
            if (n > o.count(l)) return false;
        return true;
    }
    // Defined only when o <= this.
    Multiset sub(const Multiset& o) const {
        if (!o.leq(*this)) throw TypeMismatch("multiset difference would go negative");
        auto c = counts_;
        for (const auto& [l, n] : o.counts_) {
            c[l] -= n;
            if (c[l] == 0) c.erase(l);
        }
        return Multiset(std::move(c));
    }
    // N[f]: push forward along a function, summing multiplicities over fibers.
    Multiset pushforward(const FinFunction& f) const {
        std::map<std::string, long long> c;
        for (const auto& [l, n] : counts_) c[f.apply(l)] += n;
        return Multiset(std::move(c));
    }
    bool subsetOfLabels(const FinSet& s) const {
        for (const auto& [l, n] : counts_)
            if (!s.has(l)) return false;
        return true;
    }

    friend bool operator==(const Multiset& a, const Multiset& b) { return a.counts_ == b.counts_; }
    friend bool operator!=(const Multiset& a, const Multiset& b) { return !(a == b); }

private:
    std::map<std::string, long long> counts_;
};

// Places, transitions, and multiset-valued source/target arcs.
struct PetriNet {
    FinSet places, transitions;
    std::vector<Multiset> src, tgt;  // aligned with transitions

    PetriNet() = default;
    PetriNet(FinSet p, FinSet t, std::vector<Multiset> s, std::vector<Multiset> g)
        : places(std::move(p)), transitions(std::move(t)), src(std::move(s)), tgt(std::move(g)) {
        if (static_cast<int>(src.size()) != transitions.size() ||
            static_cast<int>(tgt.size()) != transitions.size())
            throw TypeMismatch("src/tgt must be total on transitions");
        for (const auto& m : src)
            if (!m.subsetOfLabels(places)) throw TypeMismatch("src arc mentions a non-place label");
        for (const auto& m : tgt)
            if (!m.subsetOfLabels(places)) throw TypeMismatch("tgt arc mentions a non-place label");
    }

    friend bool operator==(const PetriNet& a, const PetriNet& b) {
        return a.places == b.places && a.transitions == b.transitions && a.src == b.src &&
               a.tgt == b.tgt;
    }
};

inline PetriNet freeNet(const FinSet& a) { return PetriNet(a, FinSet{}, {}, {}); }

struct PetriMorphism {
    FinFunction placeMap;  // S -> S'
    FinFunction transMap;  // T -> T'
};

// True iff both squares commute: s' o g = N[f] o s and t' o g = N[f] o t.
inline bool checkPetriMorphism(const PetriMorphism& m, const PetriNet& p, const PetriNet& q) {
    if (m.placeMap.dom() != p.places || m.placeMap.cod() != q.places ||
        m.transMap.dom() != p.transitions || m.transMap.cod() != q.transitions)
        throw TypeMismatch("morphism maps are not typed between the two nets");
    for (int t = 0; t < p.transitions.size(); ++t) {
        int t2 = m.transMap.applyIndex(t);
        if (q.src[t2] != p.src[t].pushforward(m.placeMap)) return false;
        if (q.tgt[t2] != p.tgt[t].pushforward(m.placeMap)) return false;
    }
    return true;
}

// Open Petri net: an apex net with interface legs into its places.
struct OpenPetriNet {
    FinSet left, right;
    PetriNet net;
    FinFunction inLeg, outLeg;

    OpenPetriNet() = default;
    OpenPetriNet(FinSet l, FinSet r, PetriNet n, FinFunction in, FinFunction out)
        : left(std::move(l)), right(std::move(r)), net(std::move(n)), inLeg(std::move(in)),
          outLeg(std::move(out)) {
        if (inLeg.dom() != left || inLeg.cod() != net.places)
            throw TypeMismatch("inLeg must map the left foot into the places");
        if (outLeg.dom() != right || outLeg.cod() != net.places)
            throw TypeMismatch("outLeg must map the right foot into the places");
    }

    FinCospan cospan() const { return FinCospan(left, right, net.places, inLeg, outLeg); }
};

inline OpenPetriNet iotaPetri(const FinCospan& c) {
    return OpenPetriNet(c.left, c.right, freeNet(c.apex), c.inLeg, c.outLeg);
}

namespace detail {

// Disjoint union of two label sets, tagged; tags dropped when unambiguous.
inline FinSet mergeDisjoint(const FinSet& a, const FinSet& b) {
    std::vector<std::string> tagged;
    tagged.reserve(a.size() + b.size());
    for (const auto& l : a.elements()) tagged.push_back(tagL(l));
    for (const auto& l : b.elements()) tagged.push_back(tagR(l));
    std::vector<std::string> plain;
    plain.reserve(tagged.size());
    for (const auto& l : tagged) plain.push_back(stripTag(l));
    std::unordered_map<std::string, int> seen;
    for (const auto& l : plain)
        if (!seen.emplace(l, 1).second) return FinSet(std::move(tagged));
    return FinSet(std::move(plain));
}

} // namespace detail

// Series composition: pushout on places, tagged disjoint union on transitions
// (never merged), arcs pushed along the place quotient.
inline OpenPetriNet composeOpen(const OpenPetriNet& p, const OpenPetriNet& q) {
    if (p.right != q.left)
        throw FootMismatch("open net feet disagree at the shared boundary: " +
                           detail::describe(p.right) + " vs " + detail::describe(q.left));
    PushoutResult po = pushout(p.outLeg, q.inLeg);
    FinSet transitions = detail::mergeDisjoint(p.net.transitions, q.net.transitions);
    std::vector<Multiset> src, tgt;
    src.reserve(transitions.size());
    tgt.reserve(transitions.size());
    for (int t = 0; t < p.net.transitions.size(); ++t) {
        src.push_back(p.net.src[t].pushforward(po.leftInj));
        tgt.push_back(p.net.tgt[t].pushforward(po.leftInj));
    }
    for (int t = 0; t < q.net.transitions.size(); ++t) {
        src.push_back(q.net.src[t].pushforward(po.rightInj));
        tgt.push_back(q.net.tgt[t].pushforward(po.rightInj));
    }
    PetriNet net(po.apex, std::move(transitions), std::move(src), std::move(tgt));
    return OpenPetriNet(p.left, q.right, std::move(net), p.inLeg.then(po.leftInj),
                        q.outLeg.then(po.rightInj));
}

// Parallel composition: componentwise coproducts.
inline OpenPetriNet tensorOpen(const OpenPetriNet& p, const OpenPetriNet& q) {
    CoproductResult places = coproduct(p.net.places, q.net.places);
    CoproductResult transitions = coproduct(p.net.transitions, q.net.transitions);
    std::vector<Multiset> src, tgt;
    src.reserve(transitions.set.size());
    tgt.reserve(transitions.set.size());
    for (int t = 0; t < p.net.transitions.size(); ++t) {
        src.push_back(p.net.src[t].pushforward(places.inl));
        tgt.push_back(p.net.tgt[t].pushforward(places.inl));
    }
    for (int t = 0; t < q.net.transitions.size(); ++t) {
        src.push_back(q.net.src[t].pushforward(places.inr));
        tgt.push_back(q.net.tgt[t].pushforward(places.inr));
    }
    PetriNet net(places.set, transitions.set, std::move(src), std::move(tgt));
    FinFunction in = copair(p.inLeg.then(places.inl), q.inLeg.then(places.inr));
    FinFunction out = copair(p.outLeg.then(places.inl), q.outLeg.then(places.inr));
    return OpenPetriNet(in.dom(), out.dom(), std::move(net), in, out);
}

// 2-cell: foot maps plus an apex Petri morphism, all squares commuting.
inline bool check2Cell(const FinFunction& footL, const FinFunction& footR,
                       const PetriMorphism& alpha, const OpenPetriNet& p,
                       const OpenPetriNet& q) {
    if (footL.dom() != p.left || footL.cod() != q.left || footR.dom() != p.right ||
        footR.cod() != q.right)
        throw TypeMismatch("foot maps are not typed between the two open nets");
    if (!checkPetriMorphism(alpha, p.net, q.net)) return false;
    return p.inLeg.then(alpha.placeMap) == footL.then(q.inLeg) &&
           p.outLeg.then(alpha.placeMap) == footR.then(q.outLeg);
}

namespace detail {

// Backtracking open-net isomorphism search over identical feet. Leg images force
// part of the place bijection; free places are backtracked; transitions are
// matched by arc signature under the candidate bijection, and within equal-arc
// groups by rate (sorted pairing within tolerance) when rates are supplied.
inline std::optional<std::pair<FinFunction, FinFunction>>
isoOpenNets(const OpenPetriNet& p, const OpenPetriNet& q, const std::vector<double>* ratesP,
            const std::vector<double>* ratesQ, double rateTol) {
    if (p.left != q.left || p.right != q.right) return std::nullopt;
    if (p.net.places.size() != q.net.places.size() ||
        p.net.transitions.size() != q.net.transitions.size())
        return std::nullopt;
    const int n = p.net.places.size();
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

    std::vector<int> freeP;
    for (int x = 0; x < n; ++x)
        if (target[x] == -1) freeP.push_back(x);

    std::optional<std::pair<FinFunction, FinFunction>> found;
    using ArcKey = std::pair<std::vector<std::pair<std::string, long long>>,
                             std::vector<std::pair<std::string, long long>>>;
    auto arcKey = [](const Multiset& s, const Multiset& t) -> ArcKey {
        return {{s.counts().begin(), s.counts().end()}, {t.counts().begin(), t.counts().end()}};
    };
    auto matchTransitions = [&]() -> std::optional<FinFunction> {
        FinFunction phi(p.net.places, q.net.places, target);
        std::map<ArcKey, std::vector<int>> groupsP, groupsQ;
        for (int t = 0; t < p.net.transitions.size(); ++t)
            groupsP[arcKey(p.net.src[t].pushforward(phi), p.net.tgt[t].pushforward(phi))]
                .push_back(t);
        for (int t = 0; t < q.net.transitions.size(); ++t)
            groupsQ[arcKey(q.net.src[t], q.net.tgt[t])].push_back(t);
        if (groupsP.size() != groupsQ.size()) return std::nullopt;
        std::vector<int> trans(p.net.transitions.size(), -1);
        for (auto& [k, idsP] : groupsP) {
            auto it = groupsQ.find(k);
            if (it == groupsQ.end() || it->second.size() != idsP.size()) return std::nullopt;
            std::vector<int> idsQ = it->second;
            if (ratesP) {
                auto byRate = [](const std::vector<double>& r) {
                    return [&r](int a, int b) { return r[a] < r[b]; };
                };
                std::sort(idsP.begin(), idsP.end(), byRate(*ratesP));
                std::sort(idsQ.begin(), idsQ.end(), byRate(*ratesQ));
                for (size_t i = 0; i < idsP.size(); ++i)
                    if (std::abs((*ratesP)[idsP[i]] - (*ratesQ)[idsQ[i]]) > rateTol)
                        return std::nullopt;
            }
            for (size_t i = 0; i < idsP.size(); ++i) trans[idsP[i]] = idsQ[i];
        }
        return FinFunction(p.net.transitions, q.net.transitions, std::move(trans));
    };

    std::function<bool(size_t)> search = [&](size_t i) -> bool {
        if (i == freeP.size()) {
            if (auto tr = matchTransitions()) {
                found = std::make_pair(FinFunction(p.net.places, q.net.places, target), *tr);
                return true;
            }
            return false;
        }
        for (int y = 0; y < n; ++y) {
            if (taken[y]) continue;
            target[freeP[i]] = y;
            taken[y] = 1;
            if (search(i + 1)) return true;
            target[freeP[i]] = -1;
            taken[y] = 0;
        }
        return false;
    };
    search(0);
    return found;
}

} // namespace detail

// Isomorphism of open nets over identical feet: a place bijection commuting with
// the legs plus a transition bijection preserving arcs.
inline std::optional<std::pair<FinFunction, FinFunction>>
isoOpenPetri(const OpenPetriNet& p, const OpenPetriNet& q) {
    return detail::isoOpenNets(p, q, nullptr, nullptr, 0.0);
}

} // namespace opencospan
