#include <catch2/catch_amalgamated.hpp>

#include <opencospan/grayb.hpp>
#include <opencospan/json_io.hpp>

#include "oracles.hpp"

using namespace opencospan;
using Catch::Matchers::ContainsSubstring;
using io::json;

namespace {

OpenRatedNet waterRated() {
    FinSet places({"H2", "O2", "H2O"});
    PetriNet net(places, FinSet({"1"}), {Multiset({{"H2", 2}, {"O2", 1}})},
                 {Multiset({{"H2O", 2}})});
    FinSet l({"a"}), r({"b"});
    FinCospan c(l, r, places, FinFunction(l, places, {0}), FinFunction(r, places, {2}));
    return OpenRatedNet(c, RatedNet(net, {0.5}));
}

} // namespace

TEST_CASE("finite sets parse from bare arrays and wrapped objects", "[json]") {
    FinSet s({"a", "b", "c"});
    REQUIRE(io::finSetFromJson(io::toJson(s)) == s);
    REQUIRE(io::finSetFromJson(json::parse(R"(["a","b","c"])")) == s);
    REQUIRE(io::finSetFromJson(json::parse(R"({"elements":["a","b","c"]})")) == s);
    REQUIRE_THROWS_AS(io::finSetFromJson(json::parse(R"({"labels":[]})")), ParseError);
    REQUIRE_THROWS_AS(io::finSetFromJson(json::parse(R"("a")")), ParseError);
    REQUIRE_THROWS_AS(io::finSetFromJson(json::parse(R"([1,2])")), ParseError);
    REQUIRE_THROWS_AS(io::finSetFromJson(json::parse(R"(["a","a"])")), TypeMismatch);
}

TEST_CASE("functions round-trip and validate their pieces", "[json]") {
    FinSet dom({"x", "y"}), cod({"u", "v", "w"});
    FinFunction f(dom, cod, {2, 0});
    REQUIRE(io::finFunctionFromJson(io::toJson(f)) == f);
    REQUIRE_THROWS_AS(io::finFunctionFromJson(json::parse(R"({"dom":["x"],"cod":["u"]})")),
                      ParseError);
    REQUIRE_THROWS_AS(
        io::finFunctionFromJson(json::parse(R"({"dom":["x"],"cod":["u"],"map":["u"]})")),
        ParseError);
    REQUIRE_THROWS_AS(
        io::finFunctionFromJson(json::parse(R"({"dom":["x"],"cod":["u"],"map":{"x":1}})")),
        ParseError);
    // Structurally valid JSON with a label-level error surfaces the set error.
    REQUIRE_THROWS_AS(
        io::finFunctionFromJson(json::parse(R"({"dom":["x"],"cod":["u"],"map":{}})")),
        TypeMismatch);
    REQUIRE_THROWS_AS(
        io::finFunctionFromJson(json::parse(R"({"dom":["x"],"cod":["u"],"map":{"x":"z"}})")),
        TypeMismatch);
}

TEST_CASE("cospans round-trip with their kind tag", "[json]") {
    FinSet l({"1"}), r({"2"}), apex({"m", "n"});
    FinCospan c(l, r, apex, FinFunction(l, apex, {0}), FinFunction(r, apex, {1}));
    json j = io::toJson(c);
    REQUIRE(j["kind"] == "cospan");
    REQUIRE(io::cospanFromJson(j) == c);
    io::AnySystem sys = io::systemFromJson(j);
    REQUIRE(io::kindOf(sys) == "cospan");
    REQUIRE(std::get<FinCospan>(sys) == c);
    json missing = j;
    missing.erase("apex");
    REQUIRE_THROWS_AS(io::cospanFromJson(missing), ParseError);
    REQUIRE_THROWS_WITH(io::cospanFromJson(missing), ContainsSubstring("apex"));
}

TEST_CASE("open Petri nets round-trip", "[json]") {
    OpenRatedNet w = waterRated();
    OpenPetriNet p(w.cospan.left, w.cospan.right, w.decoration.net, w.cospan.inLeg,
                   w.cospan.outLeg);
    json j = io::toJson(p);
    REQUIRE(j["kind"] == "open_petri");
    OpenPetriNet back = io::openPetriFromJson(j);
    REQUIRE(back.net == p.net);
    REQUIRE(back.cospan() == p.cospan());
    REQUIRE_THROWS_AS(io::openPetriFromJson(json::parse(R"({"kind":"open_petri"})")),
                      ParseError);

    json badCounts = j;
    badCounts["transitions"][0]["in"]["H2"] = -1;
    REQUIRE_THROWS_AS(io::openPetriFromJson(badCounts), ParseError);
    badCounts["transitions"][0]["in"]["H2"] = 1.5;
    REQUIRE_THROWS_AS(io::openPetriFromJson(badCounts), ParseError);

    json noOut = j;
    noOut["transitions"][0].erase("out");
    REQUIRE_THROWS_AS(io::openPetriFromJson(noOut), ParseError);
    json flatTransitions = j;
    flatTransitions["transitions"] = "alpha";
    REQUIRE_THROWS_AS(io::openPetriFromJson(flatTransitions), ParseError);
}

TEST_CASE("rated nets require a numeric rate per transition", "[json]") {
    OpenRatedNet w = waterRated();
    json j = io::toJson(w);
    REQUIRE(j["kind"] == "open_rated");
    REQUIRE(j["transitions"][0]["rate"] == 0.5);
    OpenRatedNet back = io::openRatedFromJson(j);
    REQUIRE(back.cospan == w.cospan);
    REQUIRE(back.decoration.net == w.decoration.net);
    REQUIRE(back.decoration.rates == w.decoration.rates);

    json noRate = j;
    noRate["transitions"][0].erase("rate");
    REQUIRE_THROWS_AS(io::openRatedFromJson(noRate), ParseError);
    noRate["transitions"][0]["rate"] = "fast";
    REQUIRE_THROWS_AS(io::openRatedFromJson(noRate), ParseError);
    // The same document parses fine as a bare open net: rates are just ignored.
    REQUIRE(io::openPetriFromJson(j).net == w.decoration.net);
}

TEST_CASE("vector fields round-trip through printed expressions", "[json]") {
    VectorField v = oracles::springSystem(2.0, 3.0).field;
    json j = io::toJson(v);
    VectorField back = io::vectorFieldFromJson(j);
    REQUIRE(back.scope == v.scope);
    REQUIRE(back.params == v.params);
    for (const auto& l : v.scope.elements())
        REQUIRE(equalExpr(back.components.at(l), v.components.at(l)));

    REQUIRE_THROWS_AS(io::vectorFieldFromJson(json::parse(R"({"scope":["x"]})")), ParseError);
    REQUIRE_THROWS_AS(
        io::vectorFieldFromJson(json::parse(R"({"scope":["x"],"components":{"x":3}})")),
        ParseError);
    REQUIRE_THROWS_AS(
        io::vectorFieldFromJson(
            json::parse(R"({"scope":["x"],"components":{"x":"x"},"params":{"k":"slow"}})")),
        ParseError);
    // Malformed component expressions surface the expression parser's error.
    REQUIRE_THROWS_AS(
        io::vectorFieldFromJson(json::parse(R"({"scope":["x"],"components":{"x":"x +"}})")),
        ParseError);
}

TEST_CASE("open dynamical systems round-trip", "[json]") {
    OpenDynam d = oracles::springSystem(2.0, 1.5);
    json j = io::toJson(d);
    REQUIRE(j["kind"] == "open_dynam");
    io::AnySystem sys = io::systemFromJson(j);
    REQUIRE(io::kindOf(sys) == "open_dynam");
    const OpenDynam& back = std::get<OpenDynam>(sys);
    REQUIRE(back.cospan == d.cospan);
    REQUIRE(back.field.params == d.field.params);
    for (const auto& l : d.field.scope.elements())
        REQUIRE(equalExpr(back.field.components.at(l), d.field.components.at(l)));
}

TEST_CASE("steady samples serialize every field", "[json]") {
    SteadySample s;
    s.inBoundary = {1.0};
    s.inflow = {0.25};
    s.outBoundary = {2.0};
    s.outflow = {0.25};
    s.witness = {1.0, 2.0};
    s.residualNorm = 1e-12;
    json j = io::toJson(s);
    REQUIRE(j["inBoundary"] == json::parse("[1.0]"));
    REQUIRE(j["outBoundary"] == json::parse("[2.0]"));
    REQUIRE(j["inflow"][0] == 0.25);
    REQUIRE(j["outflow"][0] == 0.25);
    REQUIRE(j["witness"].size() == 2);
    REQUIRE(j["residualNorm"] == 1e-12);
}

TEST_CASE("the kind discriminator rejects anything unknown", "[json]") {
    REQUIRE_THROWS_AS(io::systemFromJson(json::parse(R"([1,2,3])")), ParseError);
    REQUIRE_THROWS_AS(io::systemFromJson(json::parse(R"({"left":[]})")), ParseError);
    REQUIRE_THROWS_AS(io::systemFromJson(json::parse(R"({"kind":7})")), ParseError);
    REQUIRE_THROWS_AS(io::systemFromJson(json::parse(R"({"kind":"petri"})")), ParseError);
    REQUIRE_THROWS_WITH(io::systemFromJson(json::parse(R"({"kind":"petri"})")),
                        ContainsSubstring("unknown kind"));
}

TEST_CASE("serialization is stable: emitted JSON re-parses to itself", "[json]") {
    std::vector<json> docs;
    docs.push_back(io::toJson(waterRated()));
    docs.push_back(io::toJson(oracles::springSystem()));
    OpenRatedNet w = waterRated();
    docs.push_back(io::toJson(
        OpenPetriNet(w.cospan.left, w.cospan.right, w.decoration.net, w.cospan.inLeg,
                     w.cospan.outLeg)));
    FinSet l({"1"}), apex({"m"});
    docs.push_back(io::toJson(
        FinCospan(l, FinSet{}, apex, FinFunction(l, apex, {0}), bang(apex))));
    docs.push_back(io::toJson(grayBox(waterRated())));
    for (const json& doc : docs) {
        json again = io::toJson(io::systemFromJson(doc));
        REQUIRE(again == doc);
    }
}
