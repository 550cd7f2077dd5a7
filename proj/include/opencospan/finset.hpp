#pragma once

#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace opencospan {

// Finite set of distinct labels; iteration order is the stored order.
class FinSet {
public:
    FinSet() = default;
    explicit FinSet(std::vector<std::string> elements) : elements_(std::move(elements)) {
        for (int i = 0; i < size(); ++i)
            if (!index_.emplace(elements_[i], i).second)
                throw TypeMismatch("duplicate label '" + elements_[i] + "' in finite set");
    }

    int size() const { return static_cast<int>(elements_.size()); }
    bool empty() const { return elements_.empty(); }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::string& label(int i) const { return elements_.at(i); }
    bool has(const std::string& l) const { return index_.count(l) != 0; }
    int index(const std::string& l) const {
        auto it = index_.find(l);
        if (it == index_.end()) throw TypeMismatch("label '" + l + "' not in set");
        return it->second;
    }

    friend bool operator==(const FinSet& a, const FinSet& b) { return a.elements_ == b.elements_; }
    friend bool operator!=(const FinSet& a, const FinSet& b) { return !(a == b); }

private:
    std::vector<std::string> elements_;
    std::unordered_map<std::string, int> index_;
};

// Total function between finite sets, stored as cod indices in dom order.
class FinFunction {
public:
    FinFunction() = default;
    FinFunction(FinSet dom, FinSet cod, std::vector<int> images)
        : dom_(std::move(dom)), cod_(std::move(cod)), images_(std::move(images)) {
        if (static_cast<int>(images_.size()) != dom_.size())
            throw TypeMismatch("function image list does not cover the domain");
        for (int i : images_)
            if (i < 0 || i >= cod_.size())
                throw TypeMismatch("function image index out of codomain range");
    }

    static FinFunction fromLabels(FinSet dom, FinSet cod,
                                  const std::map<std::string, std::string>& map) {
        std::vector<int> images;
        images.reserve(dom.size());
        for (const auto& l : dom.elements()) {
            auto it = map.find(l);
            if (it == map.end()) throw TypeMismatch("no image assigned for label '" + l + "'");
            images.push_back(cod.index(it->second));
        }
        for (const auto& [k, v] : map)
            if (!dom.has(k)) throw TypeMismatch("map assigns the non-domain label '" + k + "'");
        return FinFunction(std::move(dom), std::move(cod), std::move(images));
    }

    static FinFunction identity(FinSet a) {
        std::vector<int> images(a.size());
        std::iota(images.begin(), images.end(), 0);
        FinSet cod = a;
        return FinFunction(std::move(a), std::move(cod), std::move(images));
    }

    const FinSet& dom() const { return dom_; }
    const FinSet& cod() const { return cod_; }
    int applyIndex(int i) const { return images_.at(i); }
    const std::string& apply(const std::string& l) const { return cod_.label(images_.at(dom_.index(l))); }
    const std::vector<int>& images() const { return images_; }

    bool isInjective() const {
        std::vector<char> seen(cod_.size(), 0);
        for (int i : images_) {
            if (seen[i]) return false;
            seen[i] = 1;
        }
        return true;
    }
    bool isSurjective() const {
        std::vector<char> seen(cod_.size(), 0);
        for (int i : images_) seen[i] = 1;
        for (char c : seen)
            if (!c) return false;
        return true;
    }
    bool isBijection() const { return dom_.size() == cod_.size() && isInjective(); }

    FinFunction inverse() const {
        if (!isBijection()) throw TypeMismatch("inverse requires a bijection");
        std::vector<int> images(cod_.size());
        for (int i = 0; i < dom_.size(); ++i) images[images_[i]] = i;
        return FinFunction(cod_, dom_, std::move(images));
    }

    // Diagrammatic composition: this then g.
    FinFunction then(const FinFunction& g) const {
        if (cod_ != g.dom()) throw DomainMismatch("composition feet disagree");
        std::vector<int> images;
        images.reserve(images_.size());
        for (int i : images_) images.push_back(g.applyIndex(i));
        return FinFunction(dom_, g.cod(), std::move(images));
    }

    friend bool operator==(const FinFunction& f, const FinFunction& g) {
        return f.dom_ == g.dom_ && f.cod_ == g.cod_ && f.images_ == g.images_;
    }
    friend bool operator!=(const FinFunction& f, const FinFunction& g) { return !(f == g); }

private:
    FinSet dom_, cod_;
    std::vector<int> images_;
};

struct CoproductResult {
    FinSet set;
    FinFunction inl, inr;
};

namespace detail {

inline std::string describe(const FinSet& s) {
    std::string out = "{";
    for (int i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += s.label(i);
    }
    return out + "}";
}

// Tagging is collision-free: within one side originals are distinct, across sides
// the prefixes differ, so tagged labels are distinct even if user labels contain "L.".
inline std::string tagL(const std::string& l) { return "L." + l; }
inline std::string tagR(const std::string& l) { return "R." + l; }
inline std::string stripTag(const std::string& l) { return l.substr(2); }

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};

} // namespace detail

inline CoproductResult coproduct(const FinSet& a, const FinSet& b) {
    std::vector<std::string> elements;
    elements.reserve(a.size() + b.size());
    for (const auto& l : a.elements()) elements.push_back(detail::tagL(l));
    for (const auto& l : b.elements()) elements.push_back(detail::tagR(l));
    FinSet sum(std::move(elements));
    std::vector<int> li(a.size()), ri(b.size());
    std::iota(li.begin(), li.end(), 0);
    std::iota(ri.begin(), ri.end(), a.size());
    return {sum, FinFunction(a, sum, std::move(li)), FinFunction(b, sum, std::move(ri))};
}

struct PushoutResult {
    FinSet apex;
    FinFunction leftInj;   // m -> apex
    FinFunction rightInj;  // m' -> apex
    FinFunction quotient;  // m + m' -> apex
};

// Pushout of m <-f- b -g-> m'. Apex classes are named by their lexicographically
// least tagged member; tags are dropped when the stripped names stay distinct.
inline PushoutResult pushout(const FinFunction& f, const FinFunction& g) {
    if (f.dom() != g.dom()) throw DomainMismatch("pushout legs must share their domain");
    const FinSet& m = f.cod();
    const FinSet& mp = g.cod();
    CoproductResult cp = coproduct(m, mp);

    detail::UnionFind uf(cp.set.size());
    for (int x = 0; x < f.dom().size(); ++x)
        uf.unite(cp.inl.applyIndex(f.applyIndex(x)), cp.inr.applyIndex(g.applyIndex(x)));

    // Classes ordered by first occurrence in the tagged coproduct.
    std::vector<int> classOf(cp.set.size(), -1);
    std::vector<std::string> classLabel;
    std::unordered_map<int, int> rootClass;
    for (int i = 0; i < cp.set.size(); ++i) {
        int r = uf.find(i);
        auto it = rootClass.find(r);
        if (it == rootClass.end()) {
            rootClass.emplace(r, static_cast<int>(classLabel.size()));
            classOf[i] = static_cast<int>(classLabel.size());
            classLabel.push_back(cp.set.label(i));
        } else {
            classOf[i] = it->second;
            if (cp.set.label(i) < classLabel[it->second]) classLabel[it->second] = cp.set.label(i);
        }
    }

    std::vector<std::string> stripped;
    stripped.reserve(classLabel.size());
    for (const auto& l : classLabel) stripped.push_back(detail::stripTag(l));
    {
        std::unordered_map<std::string, int> seen;
        bool unambiguous = true;
        for (const auto& l : stripped)
            if (!seen.emplace(l, 1).second) {
                unambiguous = false;
                break;
            }
        if (unambiguous) classLabel = std::move(stripped);
    }

    FinSet apex(std::move(classLabel));
    FinFunction quotient(cp.set, apex, classOf);
    return {apex, cp.inl.then(quotient), cp.inr.then(quotient), quotient};
}

// Copairing <f,g>: a+b -> c for f: a -> c, g: b -> c.
inline FinFunction copair(const FinFunction& f, const FinFunction& g) {
    if (f.cod() != g.cod()) throw CodomainMismatch("copairing needs a common codomain");
    CoproductResult cp = coproduct(f.dom(), g.dom());
    std::vector<int> images;
    images.reserve(cp.set.size());
    for (int i : f.images()) images.push_back(i);
    for (int i : g.images()) images.push_back(i);
    return FinFunction(cp.set, f.cod(), std::move(images));
}

// Codiagonal: a+a -> a, both copies onto the label.
inline FinFunction codiagonal(const FinSet& a) {
    return copair(FinFunction::identity(a), FinFunction::identity(a));
}

// Unique map from the empty set.
inline FinFunction bang(const FinSet& a) { return FinFunction(FinSet{}, a, {}); }

// Index-preserving bijection between equal-size sets (relabeling transport).
inline FinFunction positionalBijection(const FinSet& from, const FinSet& to) {
    if (from.size() != to.size()) throw TypeMismatch("positional bijection needs equal sizes");
    std::vector<int> images(from.size());
    std::iota(images.begin(), images.end(), 0);
    return FinFunction(from, to, std::move(images));
}

} // namespace opencospan
