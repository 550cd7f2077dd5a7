#include <catch2/catch_amalgamated.hpp>

#include <opencospan/finset.hpp>

#include "oracles.hpp"

using namespace opencospan;

TEST_CASE("finite sets store distinct ordered labels", "[finset]") {
    FinSet s({"a", "b", "c"});
    REQUIRE(s.size() == 3);
    REQUIRE(s.label(1) == "b");
    REQUIRE(s.index("c") == 2);
    REQUIRE(s.has("a"));
    REQUIRE_FALSE(s.has("d"));
    REQUIRE_THROWS_AS(s.index("d"), TypeMismatch);
    REQUIRE_THROWS_AS(FinSet({"a", "a"}), TypeMismatch);
    REQUIRE(FinSet({"a", "b"}) != FinSet({"b", "a"}));
    REQUIRE(FinSet{}.empty());
}

TEST_CASE("functions validate their typing data", "[finset]") {
    FinSet a({"x", "y"}), b({"u", "v", "w"});
    REQUIRE_THROWS_AS(FinFunction(a, b, {0}), TypeMismatch);
    REQUIRE_THROWS_AS(FinFunction(a, b, {0, 3}), TypeMismatch);
    REQUIRE_THROWS_AS(FinFunction(a, b, {0, -1}), TypeMismatch);
    FinFunction f(a, b, {2, 0});
    REQUIRE(f.apply("x") == "w");
    REQUIRE(f.apply("y") == "u");
    REQUIRE(f.applyIndex(0) == 2);
}

TEST_CASE("fromLabels demands a total map with no stray keys", "[finset]") {
    FinSet a({"x", "y"}), b({"u", "v"});
    FinFunction f = FinFunction::fromLabels(a, b, {{"x", "v"}, {"y", "v"}});
    REQUIRE(f.apply("x") == "v");
    REQUIRE_THROWS_AS(FinFunction::fromLabels(a, b, {{"x", "v"}}), TypeMismatch);
    REQUIRE_THROWS_AS(
        FinFunction::fromLabels(a, b, {{"x", "v"}, {"y", "v"}, {"z", "u"}}), TypeMismatch);
    REQUIRE_THROWS_AS(FinFunction::fromLabels(a, b, {{"x", "nope"}, {"y", "v"}}), TypeMismatch);
}

TEST_CASE("identity, composition, and composition typing", "[finset]") {
    FinSet a({"x", "y"}), b({"u", "v"}), c({"k"});
    FinFunction f(a, b, {1, 0});
    FinFunction g(b, c, {0, 0});
    REQUIRE(FinFunction::identity(a).then(f) == f);
    REQUIRE(f.then(FinFunction::identity(b)) == f);
    REQUIRE(f.then(g).apply("x") == "k");
    REQUIRE_THROWS_AS(g.then(f), DomainMismatch);
}

TEST_CASE("injectivity, surjectivity, and inverses", "[finset]") {
    FinSet a({"x", "y"}), b({"u", "v"});
    FinFunction swap(a, b, {1, 0});
    REQUIRE(swap.isInjective());
    REQUIRE(swap.isSurjective());
    REQUIRE(swap.isBijection());
    REQUIRE(swap.inverse().apply("u") == "y");
    REQUIRE(swap.then(swap.inverse()) == FinFunction::identity(a));
    FinFunction collapse(a, b, {0, 0});
    REQUIRE_FALSE(collapse.isInjective());
    REQUIRE_FALSE(collapse.isSurjective());
    REQUIRE_THROWS_AS(collapse.inverse(), TypeMismatch);
}

TEST_CASE("coproduct always tags both sides", "[finset]") {
    CoproductResult cp = coproduct(FinSet({"1", "2"}), FinSet({"3"}));
    REQUIRE(cp.set == FinSet({"L.1", "L.2", "R.3"}));
    REQUIRE(cp.inl.apply("1") == "L.1");
    REQUIRE(cp.inr.apply("3") == "R.3");
    CoproductResult both = coproduct(FinSet({"x"}), FinSet({"x"}));
    REQUIRE(both.set == FinSet({"L.x", "R.x"}));
    REQUIRE(coproduct(FinSet{}, FinSet{}).set.empty());
}

TEST_CASE("copair, codiagonal, and the empty map", "[finset]") {
    FinSet a({"x"}), b({"y", "z"}), c({"u", "v"});
    FinFunction f(a, c, {1});
    FinFunction g(b, c, {0, 1});
    FinFunction h = copair(f, g);
    REQUIRE(h.dom() == FinSet({"L.x", "R.y", "R.z"}));
    REQUIRE(h.apply("L.x") == "v");
    REQUIRE(h.apply("R.y") == "u");
    REQUIRE_THROWS_AS(copair(f, FinFunction(b, a, {0, 0})), CodomainMismatch);
    FinFunction cd = codiagonal(a);
    REQUIRE(cd.apply("L.x") == "x");
    REQUIRE(cd.apply("R.x") == "x");
    REQUIRE(bang(c).dom().empty());
    REQUIRE(bang(c).cod() == c);
}

TEST_CASE("positional bijection relabels by index", "[finset]") {
    FinFunction t = positionalBijection(FinSet({"a", "b"}), FinSet({"u", "v"}));
    REQUIRE(t.apply("a") == "u");
    REQUIRE(t.apply("b") == "v");
    REQUIRE_THROWS_AS(positionalBijection(FinSet({"a"}), FinSet({"u", "v"})), TypeMismatch);
}

TEST_CASE("gluing two intervals along a shared endpoint", "[finset]") {
    FinSet m({"m"}), bc1({"a", "b"}), bc2({"b", "c"});
    FinFunction f = FinFunction::fromLabels(m, bc1, {{"m", "b"}});
    FinFunction g = FinFunction::fromLabels(m, bc2, {{"m", "b"}});
    PushoutResult po = pushout(f, g);
    REQUIRE(po.apex == FinSet({"a", "b", "c"}));
    REQUIRE(po.leftInj.apply("b") == "b");
    REQUIRE(po.rightInj.apply("b") == "b");
    REQUIRE(po.rightInj.apply("c") == "c");
    REQUIRE(po.quotient.dom() == FinSet({"L.a", "L.b", "R.b", "R.c"}));
    REQUIRE(po.quotient.cod() == po.apex);
    REQUIRE(po.quotient.apply("L.b") == po.quotient.apply("R.b"));
}

TEST_CASE("pushout over the empty apex is the tagged coproduct", "[finset]") {
    FinSet e;
    FinFunction f(e, FinSet({"x"}), {});
    FinFunction g(e, FinSet({"x"}), {});
    PushoutResult po = pushout(f, g);
    REQUIRE(po.apex == FinSet({"L.x", "R.x"}));  // stripping would collide, tags stay
    REQUIRE(po.leftInj.apply("x") == "L.x");
    REQUIRE(po.rightInj.apply("x") == "R.x");
}

TEST_CASE("merged classes are named after the least tagged member", "[finset]") {
    FinSet m({"m"});
    FinFunction f = FinFunction::fromLabels(m, FinSet({"b"}), {{"m", "b"}});
    FinFunction g = FinFunction::fromLabels(m, FinSet({"a"}), {{"m", "a"}});
    PushoutResult po = pushout(f, g);
    REQUIRE(po.apex == FinSet({"b"}));  // L.b < R.a
}

TEST_CASE("pushout rejects mismatched shared apexes", "[finset]") {
    FinFunction f(FinSet({"m"}), FinSet({"b"}), {0});
    FinFunction g(FinSet({"n"}), FinSet({"c"}), {0});
    REQUIRE_THROWS_AS(pushout(f, g), DomainMismatch);
}

TEST_CASE("random pushouts match the closure oracle", "[finset]") {
    oracles::Rng rng(20240817u);
    for (int it = 0; it < 200; ++it) {
        FinSet shared = oracles::randomSet(rng, "x", 5);
        FinSet bs = oracles::randomSet(rng, "b", 6, 1);
        FinSet cs = oracles::randomSet(rng, "c", 6, 1);
        FinFunction f = oracles::randomFunction(rng, shared, bs);
        FinFunction g = oracles::randomFunction(rng, shared, cs);
        PushoutResult po = pushout(f, g);
        INFO("iteration " << it);
        REQUIRE(oracles::pushoutMatchesClosure(f, g, po));
    }
}

TEST_CASE("pushouts satisfy the universal property against exhaustive cocones", "[finset]") {
    oracles::Rng rng(7191u);
    for (int it = 0; it < 30; ++it) {
        FinSet shared = oracles::randomSet(rng, "x", 3);
        FinSet bs = oracles::randomSet(rng, "b", 4, 1);
        FinSet cs = oracles::randomSet(rng, "c", 4, 1);
        FinFunction f = oracles::randomFunction(rng, shared, bs);
        FinFunction g = oracles::randomFunction(rng, shared, cs);
        PushoutResult po = pushout(f, g);
        INFO("iteration " << it);
        REQUIRE(oracles::pushoutUniversal(f, g, po));
    }
}
