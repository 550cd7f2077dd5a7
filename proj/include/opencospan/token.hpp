#pragma once

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "petri.hpp"

namespace opencospan {

using Marking = Multiset;

struct FiringSequence {
    Marking start;
    std::vector<std::string> steps;
    Marking end;
};

namespace detail {

inline std::string markingKey(const Marking& m) {
    std::string k;
    for (const auto& [l, n] : m.counts()) {
        k += l;
        k += ':';
        k += std::to_string(n);
        k += ';';
    }
    return k;
}

inline std::optional<Marking> tryFire(const PetriNet& net, const Marking& m, int t) {
    if (!net.src[t].leq(m)) return std::nullopt;
    return m.sub(net.src[t]).add(net.tgt[t]);
}

} // namespace detail

// Consume s(tau), produce t(tau); enabled iff s(tau) <= m componentwise.
inline Marking fire(const PetriNet& net, const Marking& m, const std::string& tau) {
    if (!net.transitions.has(tau)) throw UnknownTransition("no transition '" + tau + "'");
    if (!m.subsetOfLabels(net.places)) throw TypeMismatch("marking mentions a non-place label");
    auto next = detail::tryFire(net, m, net.transitions.index(tau));
    if (!next) throw NotEnabled("transition '" + tau + "' lacks input tokens");
    return *next;
}

// True iff every step is enabled in order and the end marking matches.
inline bool validateFiring(const PetriNet& net, const FiringSequence& seq) {
    Marking m = seq.start;
    for (const auto& tau : seq.steps) {
        if (!net.transitions.has(tau)) return false;
        auto next = detail::tryFire(net, m, net.transitions.index(tau));
        if (!next) return false;
        m = *next;
    }
    return m == seq.end;
}

// Shortest firing sequence from m to target within maxDepth, breadth-first.
// Deterministic: transitions tried in stored order, frontier explored FIFO.
// stateCap bounds the number of distinct markings visited.
inline std::optional<FiringSequence> reachable(const PetriNet& net, const Marking& m,
                                               const Marking& target, long maxDepth,
                                               long stateCap = 1000000) {
    if (!m.subsetOfLabels(net.places) || !target.subsetOfLabels(net.places))
        throw TypeMismatch("marking mentions a non-place label");
    if (maxDepth < 0) throw TypeMismatch("maxDepth must be nonnegative");

    struct NodeInfo {
        long parent;  // index into nodes, -1 for the root
        int step;     // transition index used to reach this node
        long depth;
    };
    std::vector<std::pair<Marking, NodeInfo>> nodes;
    std::unordered_map<std::string, long> seen;
    std::deque<long> frontier;

    auto finish = [&](long i) {
        std::vector<std::string> steps;
        for (long k = i; nodes[k].second.parent != -1; k = nodes[k].second.parent)
            steps.push_back(net.transitions.label(nodes[k].second.step));
        std::reverse(steps.begin(), steps.end());
        return FiringSequence{m, std::move(steps), target};
    };

    nodes.push_back({m, {-1, -1, 0}});
    seen.emplace(detail::markingKey(m), 0);
    frontier.push_back(0);
    if (m == target) return finish(0);

    while (!frontier.empty()) {
        long cur = frontier.front();
        frontier.pop_front();
        if (nodes[cur].second.depth == maxDepth) continue;
        for (int t = 0; t < net.transitions.size(); ++t) {
            auto next = detail::tryFire(net, nodes[cur].first, t);
            if (!next) continue;
            std::string key = detail::markingKey(*next);
            if (seen.count(key)) continue;
            long idx = static_cast<long>(nodes.size());
            nodes.push_back({*next, {cur, t, nodes[cur].second.depth + 1}});
            seen.emplace(std::move(key), idx);
            if (*next == target) return finish(idx);
            if (static_cast<long>(seen.size()) >= stateCap) return std::nullopt;
            frontier.push_back(idx);
        }
    }
    return std::nullopt;
}

// Map a firing sequence along a Petri morphism: markings by N[f], steps by g.
// The image is revalidated; a valid morphism always yields a valid image.
inline FiringSequence transportFiring(const PetriMorphism& mor, const PetriNet& srcNet,
                                      const PetriNet& dstNet, const FiringSequence& seq) {
    if (!checkPetriMorphism(mor, srcNet, dstNet))
        throw InvalidMorphism("transport requires a valid Petri morphism");
    if (!validateFiring(srcNet, seq))
        throw InvalidMorphism("sequence is not a valid firing sequence of the source net");
    FiringSequence out;
    out.start = seq.start.pushforward(mor.placeMap);
    out.end = seq.end.pushforward(mor.placeMap);
    out.steps.reserve(seq.steps.size());
    for (const auto& tau : seq.steps) out.steps.push_back(mor.transMap.apply(tau));
    if (!validateFiring(dstNet, out))
        throw InvalidMorphism("transported sequence failed to revalidate");
    return out;
}

} // namespace opencospan
