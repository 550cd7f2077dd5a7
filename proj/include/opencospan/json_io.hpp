#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dynam.hpp"
#include "numsim.hpp"
#include "petri.hpp"
#include "rates.hpp"

namespace opencospan {
namespace io {

using json = nlohmann::ordered_json;

// --- finite sets and functions ---------------------------------------------

inline json toJson(const FinSet& s) {
    json j;
    j["elements"] = s.elements();
    return j;
}

// Accepts the {"elements": [...]} form or a bare label array.
inline FinSet finSetFromJson(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("elements"))
            throw ParseError("finite set object lacks \"elements\"");
        arr = &j.at("elements");
    }
    if (!arr->is_array()) throw ParseError("finite set must be an array of labels");
    std::vector<std::string> labels;
    for (const auto& e : *arr) {
        if (!e.is_string()) throw ParseError("finite-set labels must be strings");
        labels.push_back(e.get<std::string>());
    }
    return FinSet(std::move(labels));
}

inline json toJson(const FinFunction& f) {
    json j;
    j["dom"] = toJson(f.dom());
    j["cod"] = toJson(f.cod());
    json map = json::object();
    for (int i = 0; i < f.dom().size(); ++i)
        map[f.dom().label(i)] = f.cod().label(f.applyIndex(i));
    j["map"] = map;
    return j;
}

inline FinFunction finFunctionFromJson(const json& j) {
    if (!j.is_object() || !j.contains("dom") || !j.contains("cod") || !j.contains("map"))
        throw ParseError("function needs \"dom\", \"cod\", and \"map\"");
    FinSet dom = finSetFromJson(j.at("dom"));
    FinSet cod = finSetFromJson(j.at("cod"));
    if (!j.at("map").is_object()) throw ParseError("\"map\" must be a label-to-label object");
    std::map<std::string, std::string> map;
    for (const auto& [k, v] : j.at("map").items()) {
        if (!v.is_string()) throw ParseError("\"map\" values must be strings");
        map[k] = v.get<std::string>();
    }
    return FinFunction::fromLabels(std::move(dom), std::move(cod), map);
}

// --- cospans ----------------------------------------------------------------

inline json toJson(const FinCospan& c) {
    json j;
    j["kind"] = "cospan";
    j["left"] = toJson(c.left);
    j["right"] = toJson(c.right);
    j["apex"] = toJson(c.apex);
    j["inLeg"] = toJson(c.inLeg);
    j["outLeg"] = toJson(c.outLeg);
    return j;
}

inline FinCospan cospanFromJson(const json& j) {
    for (const char* key : {"left", "right", "apex", "inLeg", "outLeg"})
        if (!j.contains(key)) throw ParseError(std::string("cospan lacks \"") + key + "\"");
    return FinCospan(finSetFromJson(j.at("left")), finSetFromJson(j.at("right")),
                     finSetFromJson(j.at("apex")), finFunctionFromJson(j.at("inLeg")),
                     finFunctionFromJson(j.at("outLeg")));
}

// --- Petri nets -------------------------------------------------------------

namespace detail {

inline json multisetToJson(const Multiset& m) {
    json j = json::object();
    for (const auto& [label, count] : m.counts()) j[label] = count;
    return j;
}

inline Multiset multisetFromJson(const json& j) {
    if (!j.is_object()) throw ParseError("multiset must be a label-to-count object");
    std::map<std::string, long long> counts;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ParseError("multiset counts must be nonnegative integers");
        counts[k] = v.get<long long>();
    }
    return Multiset(counts);
}

// Shared by PetriNet and RatedNet serialization; rates is null for bare nets.
inline json netToJson(const PetriNet& net, const std::vector<double>* rates) {
    json j;
    j["places"] = net.places.elements();
    json ts = json::array();
    for (int t = 0; t < net.transitions.size(); ++t) {
        json tj;
        tj["name"] = net.transitions.label(t);
        tj["in"] = multisetToJson(net.src[t]);
        tj["out"] = multisetToJson(net.tgt[t]);
        if (rates) tj["rate"] = (*rates)[t];
        ts.push_back(std::move(tj));
    }
    j["transitions"] = std::move(ts);
    return j;
}

inline PetriNet netFromJson(const json& j, std::vector<double>* ratesOut) {
    if (!j.contains("places") || !j.contains("transitions"))
        throw ParseError("Petri net needs \"places\" and \"transitions\"");
    FinSet places = finSetFromJson(j.at("places"));
    if (!j.at("transitions").is_array())
        throw ParseError("\"transitions\" must be an array");
    std::vector<std::string> names;
    std::vector<Multiset> src, tgt;
    for (const auto& tj : j.at("transitions")) {
        if (!tj.is_object() || !tj.contains("name") || !tj.contains("in") ||
            !tj.contains("out"))
            throw ParseError("transition needs \"name\", \"in\", and \"out\"");
        names.push_back(tj.at("name").get<std::string>());
        src.push_back(multisetFromJson(tj.at("in")));
        tgt.push_back(multisetFromJson(tj.at("out")));
        if (ratesOut) {
            if (!tj.contains("rate") || !tj.at("rate").is_number())
                throw ParseError("rated transition needs a numeric \"rate\"");
            ratesOut->push_back(tj.at("rate").get<double>());
        }
    }
    return PetriNet(std::move(places), FinSet(std::move(names)), std::move(src),
                    std::move(tgt));
}

} // namespace detail

inline json toJson(const PetriNet& net) { return detail::netToJson(net, nullptr); }

inline PetriNet petriNetFromJson(const json& j) { return detail::netFromJson(j, nullptr); }

inline json toJson(const RatedNet& r) { return detail::netToJson(r.net, &r.rates); }

inline RatedNet ratedNetFromJson(const json& j) {
    std::vector<double> rates;
    PetriNet net = detail::netFromJson(j, &rates);
    return RatedNet(std::move(net), std::move(rates));
}

inline json toJson(const OpenPetriNet& p) {
    json j;
    j["kind"] = "open_petri";
    j["left"] = toJson(p.left);
    j["right"] = toJson(p.right);
    json net = toJson(p.net);
    j["places"] = std::move(net["places"]);
    j["transitions"] = std::move(net["transitions"]);
    j["inLeg"] = toJson(p.inLeg);
    j["outLeg"] = toJson(p.outLeg);
    return j;
}

inline OpenPetriNet openPetriFromJson(const json& j) {
    for (const char* key : {"left", "right", "inLeg", "outLeg"})
        if (!j.contains(key))
            throw ParseError(std::string("open Petri net lacks \"") + key + "\"");
    return OpenPetriNet(finSetFromJson(j.at("left")), finSetFromJson(j.at("right")),
                        petriNetFromJson(j), finFunctionFromJson(j.at("inLeg")),
                        finFunctionFromJson(j.at("outLeg")));
}

inline json toJson(const OpenRatedNet& p) {
    json j;
    j["kind"] = "open_rated";
    j["left"] = toJson(p.cospan.left);
    j["right"] = toJson(p.cospan.right);
    json net = toJson(p.decoration);
    j["places"] = std::move(net["places"]);
    j["transitions"] = std::move(net["transitions"]);
    j["inLeg"] = toJson(p.cospan.inLeg);
    j["outLeg"] = toJson(p.cospan.outLeg);
    return j;
}

inline OpenRatedNet openRatedFromJson(const json& j) {
    for (const char* key : {"left", "right", "inLeg", "outLeg"})
        if (!j.contains(key))
            throw ParseError(std::string("open rated net lacks \"") + key + "\"");
    RatedNet dec = ratedNetFromJson(j);
    FinCospan cospan(finSetFromJson(j.at("left")), finSetFromJson(j.at("right")),
                     dec.net.places, finFunctionFromJson(j.at("inLeg")),
                     finFunctionFromJson(j.at("outLeg")));
    return OpenRatedNet(std::move(cospan), std::move(dec));
}

// --- vector fields and open dynamical systems -------------------------------

inline json toJson(const VectorField& v) {
    json j;
    j["scope"] = v.scope.elements();
    json comps = json::object();
    for (int i = 0; i < v.scope.size(); ++i) {
        const std::string& l = v.scope.label(i);
        comps[l] = v.components.at(l).str();
    }
    j["components"] = std::move(comps);
    j["params"] = json::object();
    for (const auto& [k, val] : v.params) j["params"][k] = val;
    return j;
}

inline VectorField vectorFieldFromJson(const json& j) {
    if (!j.contains("scope") || !j.contains("components"))
        throw ParseError("vector field needs \"scope\" and \"components\"");
    FinSet scope = finSetFromJson(j.at("scope"));
    std::map<std::string, double> params;
    if (j.contains("params")) {
        if (!j.at("params").is_object())
            throw ParseError("\"params\" must be a name-to-number object");
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw ParseError("parameter values must be numbers");
            params[k] = v.get<double>();
        }
    }
    std::set<std::string> declared;
    for (const auto& l : scope.elements()) declared.insert(l);
    for (const auto& [k, v] : params) {
        (void)v;
        declared.insert(k);
    }
    if (!j.at("components").is_object())
        throw ParseError("\"components\" must be a label-to-expression object");
    std::map<std::string, Expr> comps;
    for (const auto& [k, v] : j.at("components").items()) {
        if (!v.is_string()) throw ParseError("component expressions must be strings");
        comps[k] = parseExpr(v.get<std::string>(), declared);
    }
    return VectorField(std::move(scope), std::move(comps), std::move(params));
}

inline json toJson(const OpenDynam& d) {
    json j;
    j["kind"] = "open_dynam";
    j["left"] = toJson(d.cospan.left);
    j["right"] = toJson(d.cospan.right);
    json field = toJson(d.field);
    j["scope"] = std::move(field["scope"]);
    j["components"] = std::move(field["components"]);
    j["params"] = std::move(field["params"]);
    j["inLeg"] = toJson(d.cospan.inLeg);
    j["outLeg"] = toJson(d.cospan.outLeg);
    return j;
}

inline OpenDynam openDynamFromJson(const json& j) {
    for (const char* key : {"left", "right", "inLeg", "outLeg"})
        if (!j.contains(key))
            throw ParseError(std::string("open dynamical system lacks \"") + key + "\"");
    VectorField field = vectorFieldFromJson(j);
    FinCospan cospan(finSetFromJson(j.at("left")), finSetFromJson(j.at("right")),
                     field.scope, finFunctionFromJson(j.at("inLeg")),
                     finFunctionFromJson(j.at("outLeg")));
    return OpenDynam(std::move(cospan), std::move(field));
}

// --- steady samples ---------------------------------------------------------

inline json toJson(const SteadySample& s) {
    json j;
    j["inBoundary"] = s.inBoundary;
    j["inflow"] = s.inflow;
    j["outBoundary"] = s.outBoundary;
    j["outflow"] = s.outflow;
    j["witness"] = s.witness;
    j["residualNorm"] = s.residualNorm;
    return j;
}

// --- kind-discriminated open-system files -----------------------------------

using AnySystem = std::variant<FinCospan, OpenPetriNet, OpenRatedNet, OpenDynam>;

inline std::string kindOf(const AnySystem& s) {
    switch (s.index()) {
    case 0: return "cospan";
    case 1: return "open_petri";
    case 2: return "open_rated";
    default: return "open_dynam";
    }
}

inline AnySystem systemFromJson(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ParseError("open-system file needs a string \"kind\" discriminator");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "cospan") return cospanFromJson(j);
    if (kind == "open_petri") return openPetriFromJson(j);
    if (kind == "open_rated") return openRatedFromJson(j);
    if (kind == "open_dynam") return openDynamFromJson(j);
    throw ParseError("unknown kind \"" + kind +
                     "\" (expected cospan | open_petri | open_rated | open_dynam)");
}

inline json toJson(const AnySystem& s) {
    return std::visit([](const auto& v) { return toJson(v); }, s);
}

} // namespace io
} // namespace opencospan
