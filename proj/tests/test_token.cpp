#include <catch2/catch_amalgamated.hpp>

#include <opencospan/token.hpp>

#include "oracles.hpp"

using namespace opencospan;

namespace {

Multiset ms(std::map<std::string, long long> c) { return Multiset(std::move(c)); }

// A + B --alpha--> C, C --beta--> 2B.
PetriNet chainNet() {
    return PetriNet(FinSet({"A", "B", "C"}), FinSet({"alpha", "beta"}),
                    {ms({{"A", 1}, {"B", 1}}), ms({{"C", 1}})},
                    {ms({{"C", 1}}), ms({{"B", 2}})});
}

} // namespace

TEST_CASE("firing consumes sources and produces targets", "[token]") {
    PetriNet n = chainNet();
    REQUIRE(fire(n, ms({{"A", 1}, {"B", 2}}), "alpha") == ms({{"B", 1}, {"C", 1}}));
    REQUIRE(fire(n, ms({{"C", 1}}), "beta") == ms({{"B", 2}}));
    REQUIRE_THROWS_AS(fire(n, ms({{"A", 1}}), "alpha"), NotEnabled);
    REQUIRE_THROWS_AS(fire(n, ms({{"A", 1}, {"B", 1}}), "gamma"), UnknownTransition);
    REQUIRE_THROWS_AS(fire(n, ms({{"Z", 1}}), "alpha"), TypeMismatch);
}

TEST_CASE("sequence validation replays every step", "[token]") {
    PetriNet n = chainNet();
    FiringSequence good{ms({{"A", 1}, {"B", 2}}), {"alpha", "beta"}, ms({{"B", 3}})};
    REQUIRE(validateFiring(n, good));
    FiringSequence wrongEnd{ms({{"A", 1}, {"B", 2}}), {"alpha", "beta"}, ms({{"B", 2}})};
    REQUIRE_FALSE(validateFiring(n, wrongEnd));
    FiringSequence notEnabled{ms({{"A", 1}}), {"alpha"}, ms({{"C", 1}})};
    REQUIRE_FALSE(validateFiring(n, notEnabled));
    FiringSequence unknown{ms({{"A", 1}}), {"nope"}, ms({{"A", 1}})};
    REQUIRE_FALSE(validateFiring(n, unknown));
    FiringSequence emptyOk{ms({{"A", 1}}), {}, ms({{"A", 1}})};
    REQUIRE(validateFiring(n, emptyOk));
}

TEST_CASE("breadth-first search returns a shortest witness", "[token]") {
    PetriNet n = chainNet();
    auto seq = reachable(n, ms({{"A", 1}, {"B", 2}}), ms({{"B", 3}}), 10);
    REQUIRE(seq.has_value());
    REQUIRE(seq->steps == std::vector<std::string>{"alpha", "beta"});
    REQUIRE(validateFiring(n, *seq));
    auto self = reachable(n, ms({{"A", 1}}), ms({{"A", 1}}), 10);
    REQUIRE(self.has_value());
    REQUIRE(self->steps.empty());
    REQUIRE_FALSE(reachable(n, ms({{"B", 1}}), ms({{"A", 1}}), 10).has_value());
}

TEST_CASE("the depth bound is honored exactly", "[token]") {
    PetriNet n = chainNet();
    Marking from = ms({{"A", 1}, {"B", 2}});
    Marking to = ms({{"B", 3}});
    REQUIRE_FALSE(reachable(n, from, to, 1).has_value());
    REQUIRE(reachable(n, from, to, 2).has_value());
    REQUIRE_THROWS_AS(reachable(n, from, to, -1), TypeMismatch);
    REQUIRE_THROWS_AS(reachable(n, ms({{"Z", 1}}), to, 3), TypeMismatch);
    REQUIRE_THROWS_AS(reachable(n, from, ms({{"Z", 1}}), 3), TypeMismatch);
}

TEST_CASE("the state cap stops exploding searches", "[token]") {
    // A generator transition makes infinitely many markings reachable.
    PetriNet gen(FinSet({"A"}), FinSet({"make"}), {ms({})}, {ms({{"A", 1}})});
    REQUIRE_FALSE(reachable(gen, ms({}), ms({{"A", 1000}}), 1000000, 50).has_value());
    REQUIRE(reachable(gen, ms({}), ms({{"A", 30}}), 1000000, 50).has_value());
}

TEST_CASE("search agrees with iterative deepening on random nets", "[token]") {
    oracles::Rng rng(0xf00du);
    for (int it = 0; it < 40; ++it) {
        PetriNet n = oracles::randomNet(rng, 3, 3, 2);
        Marking from = oracles::randomMultiset(rng, n.places, 3);
        Marking to = oracles::randomMultiset(rng, n.places, 3);
        const long depth = 6;
        auto got = reachable(n, from, to, depth);
        auto expect = oracles::shortestByDFS(n, from, to, depth);
        INFO("iteration " << it);
        REQUIRE(got.has_value() == expect.has_value());
        if (got) {
            REQUIRE(static_cast<long>(got->steps.size()) == *expect);
            REQUIRE(validateFiring(n, *got));
        }
    }
}

TEST_CASE("transport maps firing sequences along morphisms", "[token]") {
    PetriNet big(FinSet({"H+", "OH-", "H2O", "D+", "OD-", "D2O"}), FinSet({"alpha", "alpha'"}),
                 {ms({{"H+", 1}, {"OH-", 1}}), ms({{"D+", 1}, {"OD-", 1}})},
                 {ms({{"H2O", 1}}), ms({{"D2O", 1}})});
    PetriNet small(FinSet({"H+", "OH-", "H2O"}), FinSet({"alpha"}),
                   {ms({{"H+", 1}, {"OH-", 1}})}, {ms({{"H2O", 1}})});
    PetriMorphism proj{
        FinFunction::fromLabels(big.places, small.places,
                                {{"H+", "H+"}, {"OH-", "OH-"}, {"H2O", "H2O"}, {"D+", "H+"},
                                 {"OD-", "OH-"}, {"D2O", "H2O"}}),
        FinFunction::fromLabels(big.transitions, small.transitions,
                                {{"alpha", "alpha"}, {"alpha'", "alpha"}})};
    FiringSequence seq{ms({{"D+", 1}, {"OD-", 1}, {"H+", 1}}), {"alpha'"},
                       ms({{"D2O", 1}, {"H+", 1}})};
    FiringSequence image = transportFiring(proj, big, small, seq);
    REQUIRE(image.start == ms({{"H+", 2}, {"OH-", 1}}));
    REQUIRE(image.steps == std::vector<std::string>{"alpha"});
    REQUIRE(image.end == ms({{"H2O", 1}, {"H+", 1}}));
    REQUIRE(validateFiring(small, image));

    FiringSequence bogus{ms({{"D+", 1}}), {"alpha'"}, ms({{"D2O", 1}})};
    REQUIRE_THROWS_AS(transportFiring(proj, big, small, bogus), InvalidMorphism);
    PetriMorphism notMor{proj.placeMap,
                         FinFunction::fromLabels(big.transitions, small.transitions,
                                                 {{"alpha", "alpha"}, {"alpha'", "alpha"}})};
    // Break the place map so the squares stop commuting.
    notMor.placeMap = FinFunction::fromLabels(
        big.places, small.places,
        {{"H+", "H2O"}, {"OH-", "OH-"}, {"H2O", "H2O"}, {"D+", "H+"}, {"OD-", "OH-"},
         {"D2O", "H2O"}});
    REQUIRE_THROWS_AS(transportFiring(notMor, big, small, seq), InvalidMorphism);
}
