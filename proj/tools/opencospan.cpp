#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opencospan/grayb.hpp"
#include "opencospan/json_io.hpp"
#include "opencospan/numsim.hpp"
#include "opencospan/token.hpp"

namespace fs = std::filesystem;
using namespace opencospan;
using io::AnySystem;
using io::json;

namespace {

constexpr int kOk = 0;       // success
constexpr int kNegative = 1; // analysis ran and answered "no"
constexpr int kBadInput = 2; // malformed input or ill-typed request

json loadJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

AnySystem loadSystem(const std::string& path) {
    return io::systemFromJson(loadJsonFile(path));
}

std::string fmtReal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Multiset parseMarking(const std::string& text) {
    std::map<std::string, long long> counts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto colon = item.rfind(':');
        if (colon == std::string::npos)
            throw ParseError("marking entry \"" + item + "\" is not place:count");
        std::string place = item.substr(0, colon);
        long long count = 0;
        try {
            size_t used = 0;
            count = std::stoll(item.substr(colon + 1), &used);
            if (used != item.size() - colon - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("marking count in \"" + item + "\" is not an integer");
        }
        if (count < 0) throw ParseError("marking count for " + place + " is negative");
        counts[place] += count;
    }
    return Multiset(counts);
}

std::vector<double> parseNumberList(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("\"" + item + "\" is not a number");
        }
    }
    return out;
}

std::vector<Expr> parseExprList(const std::string& text, int expected,
                                const std::map<std::string, double>& params) {
    std::set<std::string> declared;
    for (const auto& [k, v] : params) {
        (void)v;
        declared.insert(k);
    }
    std::vector<Expr> out;
    if (!text.empty()) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parseExpr(item, declared));
    }
    if (out.empty()) out.assign(expected, Expr::zero());
    if (static_cast<int>(out.size()) != expected)
        throw ShapeMismatch("expected " + std::to_string(expected) +
                            " comma-separated flow entries, got " +
                            std::to_string(out.size()));
    return out;
}

OpenDynam toDynam(AnySystem sys, const std::string& path) {
    if (auto* d = std::get_if<OpenDynam>(&sys)) return std::move(*d);
    if (auto* r = std::get_if<OpenRatedNet>(&sys)) return grayBox(*r);
    throw TypeMismatch(path + ": expected an open_dynam (or open_rated) system, got " +
                       io::kindOf(sys));
}

// --- wiring scripts ---------------------------------------------------------

int kindIndex(const AnySystem& s) { return static_cast<int>(s.index()); }

AnySystem promote(AnySystem s, int targetKind) {
    auto* c = std::get_if<FinCospan>(&s);
    if (!c || targetKind == 0) return s;
    switch (targetKind) {
    case 1: return iotaPetri(*c);
    case 2: return iotaRated(*c);
    default: return iotaDynam(*c);
    }
}

AnySystem composeAny(AnySystem a, AnySystem b) {
    int k = std::max(kindIndex(a), kindIndex(b));
    a = promote(std::move(a), k);
    b = promote(std::move(b), k);
    if (kindIndex(a) != kindIndex(b))
        throw TypeMismatch("cannot compose a " + io::kindOf(a) + " with a " + io::kindOf(b));
    switch (k) {
    case 0: return composeCospan(std::get<FinCospan>(a), std::get<FinCospan>(b));
    case 1: return composeOpen(std::get<OpenPetriNet>(a), std::get<OpenPetriNet>(b));
    case 2: return composeOpenRated(std::get<OpenRatedNet>(a), std::get<OpenRatedNet>(b));
    default: return composeOpenDynam(std::get<OpenDynam>(a), std::get<OpenDynam>(b));
    }
}

AnySystem tensorAny(AnySystem a, AnySystem b) {
    int k = std::max(kindIndex(a), kindIndex(b));
    a = promote(std::move(a), k);
    b = promote(std::move(b), k);
    if (kindIndex(a) != kindIndex(b))
        throw TypeMismatch("cannot tensor a " + io::kindOf(a) + " with a " + io::kindOf(b));
    switch (k) {
    case 0: return tensorCospan(std::get<FinCospan>(a), std::get<FinCospan>(b));
    case 1: return tensorOpen(std::get<OpenPetriNet>(a), std::get<OpenPetriNet>(b));
    case 2: return tensorOpenRated(std::get<OpenRatedNet>(a), std::get<OpenRatedNet>(b));
    default: return tensorOpenDynam(std::get<OpenDynam>(a), std::get<OpenDynam>(b));
    }
}

FinCospan frobeniusByName(const std::string& generator, const FinSet& foot) {
    FrobeniusGenerators g = frobeniusGenerators(foot);
    if (generator == "mu") return g.mu;
    if (generator == "eta") return g.eta;
    if (generator == "delta") return g.delta;
    if (generator == "epsilon") return g.epsilon;
    if (generator == "cup") return g.cup;
    if (generator == "cap") return g.cap;
    throw ParseError("unknown Frobenius generator \"" + generator +
                     "\" (expected mu | eta | delta | epsilon | cup | cap)");
}

// Evaluates a wiring script: named systems loaded from files (paths relative
// to the script), then operations applied left-to-right.
AnySystem runScript(const std::string& scriptPath) {
    json script = loadJsonFile(scriptPath);
    fs::path base = fs::path(scriptPath).parent_path();
    std::map<std::string, AnySystem> env;
    if (script.contains("systems")) {
        if (!script.at("systems").is_object())
            throw ParseError("\"systems\" must map names to file paths");
        for (const auto& [name, ref] : script.at("systems").items()) {
            if (!ref.is_string())
                throw ParseError("system \"" + name + "\" must reference a file path");
            fs::path p = ref.get<std::string>();
            if (p.is_relative()) p = base / p;
            env.emplace(name, loadSystem(p.string()));
        }
    }
    auto lookup = [&](const std::string& name) -> const AnySystem& {
        auto it = env.find(name);
        if (it == env.end()) throw ParseError("undeclared system \"" + name + "\"");
        return it->second;
    };
    std::string last;
    if (script.contains("operations")) {
        if (!script.at("operations").is_array())
            throw ParseError("\"operations\" must be an array");
        int stepNo = 0;
        for (const auto& op : script.at("operations")) {
            ++stepNo;
            std::string stepName = "step " + std::to_string(stepNo);
            try {
                if (!op.is_object() || !op.contains("op"))
                    throw ParseError("operation needs an \"op\" field");
                std::string kind = op.at("op").get<std::string>();
                std::string as =
                    op.contains("as") ? op.at("as").get<std::string>() : std::string();
                if (as.empty()) throw ParseError("operation needs an \"as\" result name");
                AnySystem result = [&]() -> AnySystem {
                    if (kind == "compose" || kind == "tensor") {
                        if (!op.contains("args") || !op.at("args").is_array() ||
                            op.at("args").size() != 2)
                            throw ParseError("\"" + kind + "\" needs \"args\": [name, name]");
                        const AnySystem& a = lookup(op.at("args")[0].get<std::string>());
                        const AnySystem& b = lookup(op.at("args")[1].get<std::string>());
                        return kind == "compose" ? composeAny(a, b) : tensorAny(a, b);
                    }
                    if (kind == "iota") {
                        if (!op.contains("cospan"))
                            throw ParseError("\"iota\" needs a \"cospan\"");
                        const json& cj = op.at("cospan");
                        if (cj.is_string()) {
                            fs::path p = cj.get<std::string>();
                            if (p.is_relative()) p = base / p;
                            return io::cospanFromJson(loadJsonFile(p.string()));
                        }
                        return io::cospanFromJson(cj);
                    }
                    if (kind == "frobenius") {
                        if (!op.contains("generator") || !op.contains("foot"))
                            throw ParseError(
                                "\"frobenius\" needs \"generator\" and \"foot\"");
                        return frobeniusByName(op.at("generator").get<std::string>(),
                                               io::finSetFromJson(op.at("foot")));
                    }
                    throw ParseError("unknown op \"" + kind +
                                     "\" (expected compose | tensor | iota | frobenius)");
                }();
                env.insert_or_assign(as, std::move(result));
                last = as;
            } catch (const Error& e) {
                throw ParseError(stepName + ": " + e.what());
            } catch (const json::exception& e) {
                throw ParseError(stepName + ": " + e.what());
            }
        }
    }
    std::string resultName;
    if (script.contains("result")) resultName = script.at("result").get<std::string>();
    else if (!last.empty()) resultName = last;
    else if (env.size() == 1) resultName = env.begin()->first;
    else throw ParseError("script has no \"result\" and no operations to infer one from");
    return lookup(resultName);
}

// --- commands ---------------------------------------------------------------

int cmdCompose(const std::string& scriptPath, const std::string& outPath) {
    AnySystem result = runScript(scriptPath);
    std::ofstream out(outPath);
    if (!out) throw ParseError("cannot write file: " + outPath);
    out << io::toJson(result).dump(2) << "\n";
    return kOk;
}

int cmdOde(const std::string& path) {
    AnySystem sys = loadSystem(path);
    auto* rated = std::get_if<OpenRatedNet>(&sys);
    if (!rated)
        throw TypeMismatch(path + ": expected an open_rated system, got " + io::kindOf(sys));
    VectorField v = massAction(rated->decoration);
    for (int i = 0; i < v.scope.size(); ++i) {
        const std::string& l = v.scope.label(i);
        const Expr& e = v.components.at(l);
        auto p = Poly::fromExpr(e);
        std::cout << "d[" << l << "]/dt = " << (p ? p->str() : e.str()) << "\n";
    }
    return kOk;
}

int cmdSimulate(const std::string& path, const std::string& x0Text, double t0, double t1,
                int steps, const std::string& inflowText, const std::string& outflowText) {
    OpenDynam d = toDynam(loadSystem(path), path);
    std::vector<double> x0 = parseNumberList(x0Text);
    std::vector<Expr> inflow =
        parseExprList(inflowText, d.cospan.left.size(), d.field.params);
    std::vector<Expr> outflow =
        parseExprList(outflowText, d.cospan.right.size(), d.field.params);
    Trajectory traj = integrate(d, x0, inflow, outflow, t0, t1, steps);
    std::cout << "t";
    for (int i = 0; i < d.field.scope.size(); ++i) std::cout << "," << d.field.scope.label(i);
    std::cout << "\n";
    for (size_t r = 0; r < traj.times.size(); ++r) {
        std::cout << fmtReal(traj.times[r]);
        for (double v : traj.states[r]) std::cout << "," << fmtReal(v);
        std::cout << "\n";
    }
    return kOk;
}

int cmdSteady(const std::string& path, const std::string& inflowText,
              const std::string& outflowText, const GridSpec& grid) {
    OpenDynam d = toDynam(loadSystem(path), path);
    std::vector<double> I = parseNumberList(inflowText);
    std::vector<double> O = parseNumberList(outflowText);
    if (I.empty()) I.assign(d.cospan.left.size(), 0.0);
    if (O.empty()) O.assign(d.cospan.right.size(), 0.0);
    std::vector<SteadySample> samples = steadyStates(d, I, O, grid);
    json out = json::array();
    for (const SteadySample& s : samples) out.push_back(io::toJson(s));
    std::cout << out.dump(2) << "\n";
    if (samples.empty()) {
        std::cerr << "no steady states found\n";
        return kNegative;
    }
    return kOk;
}

int cmdReach(const std::string& path, const std::string& fromText, const std::string& toText,
             int depth) {
    json j = loadJsonFile(path);
    PetriNet net = j.contains("places") && j.contains("inLeg")
                       ? io::openPetriFromJson(j).net
                       : io::petriNetFromJson(j);
    Multiset from = parseMarking(fromText);
    Multiset to = parseMarking(toText);
    for (const Multiset* m : {&from, &to})
        for (const auto& [place, count] : m->counts()) {
            (void)count;
            if (!net.places.has(place))
                throw TypeMismatch("marking uses unknown place \"" + place + "\"");
        }
    std::optional<FiringSequence> seq = reachable(net, from, to, depth);
    if (!seq) {
        std::cout << "unreachable within depth " << depth << "\n";
        return kNegative;
    }
    for (size_t i = 0; i < seq->steps.size(); ++i)
        std::cout << (i ? "," : "") << seq->steps[i];
    std::cout << "\n";
    return kOk;
}

int cmdCheckLaws(int setSize) {
    if (setSize < 0) throw TypeMismatch("--set-size must be nonnegative");
    std::vector<std::string> labels;
    for (int i = 0; i < setSize; ++i) labels.push_back(std::string(1, char('a' + i % 26)) +
                                                       (i >= 26 ? std::to_string(i / 26) : ""));
    try {
        checkFrobeniusLaws(FinSet(std::move(labels)));
    } catch (const LawViolation& e) {
        std::cout << e.what() << "\n";
        return kNegative;
    }
    std::cout << "all 9 laws hold (up to isomorphism)\n";
    return kOk;
}

int cmdValidate(const std::string& path) {
    try {
        AnySystem sys = loadSystem(path);
        json echo = io::toJson(sys);
        AnySystem again = io::systemFromJson(echo);
        if (io::toJson(again) != echo) {
            std::cout << "invalid: " << path << " does not round-trip\n";
            return kNegative;
        }
        std::cout << "valid " << io::kindOf(sys) << ": " << path << "\n";
        return kOk;
    } catch (const Error& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return kNegative;
    } catch (const std::exception& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return kNegative;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compositional open-systems modeling toolkit"};
    app.require_subcommand(1);

    std::string scriptPath, outPath;
    auto* compose = app.add_subcommand("compose", "evaluate a wiring script");
    compose->add_option("script", scriptPath, "wiring script JSON")->required();
    compose->add_option("-o,--output", outPath, "output file")->required();

    std::string odePath;
    auto* ode = app.add_subcommand("ode", "print mass-action rate equations");
    ode->add_option("file", odePath, "open_rated JSON file")->required();

    std::string simPath, x0Text, simInflow, simOutflow;
    double t0 = 0.0, t1 = 0.0;
    int steps = 0;
    auto* simulate = app.add_subcommand("simulate", "integrate with RK4, emit CSV");
    simulate->add_option("file", simPath, "open_dynam JSON file")->required();
    simulate->add_option("--x0", x0Text, "initial state, comma-separated in scope order")
        ->required();
    simulate->add_option("--t0", t0, "start time (default 0)");
    simulate->add_option("--t1", t1, "end time")->required();
    simulate->add_option("--steps", steps, "number of RK4 steps")->required();
    simulate->add_option("--inflow", simInflow, "inflow expressions in t, one per left-foot element");
    simulate->add_option("--outflow", simOutflow, "outflow expressions in t, one per right-foot element");

    std::string steadyPath, steadyInflow, steadyOutflow;
    GridSpec grid;
    auto* steady = app.add_subcommand("steady", "sample steady states, emit JSON");
    steady->add_option("file", steadyPath, "open_dynam JSON file")->required();
    steady->add_option("--inflow", steadyInflow, "inflow values, one per left-foot element");
    steady->add_option("--outflow", steadyOutflow, "outflow values, one per right-foot element");
    steady->add_option("--grid-lo", grid.lo, "grid lower bound (default -5)");
    steady->add_option("--grid-hi", grid.hi, "grid upper bound (default 5)");
    steady->add_option("--grid-points", grid.pointsPerDim, "grid points per dimension (default 3)");
    steady->add_option("--max-starts", grid.maxStarts, "cap on Newton starts (default 729)");

    std::string reachPath, fromText, toText;
    int depth = 10;
    auto* reach = app.add_subcommand("reach", "shortest firing sequence between markings");
    reach->add_option("file", reachPath, "petri or open_petri JSON file")->required();
    reach->add_option("--from", fromText, "start marking place:count,...")->required();
    reach->add_option("--to", toText, "target marking place:count,...")->required();
    reach->add_option("--depth", depth, "maximum number of firings (default 10)");

    int setSize = 0;
    auto* laws = app.add_subcommand("check-laws", "verify the Frobenius laws");
    laws->add_option("--set-size", setSize, "size of the foot set")->required();

    std::string validatePath;
    auto* validate = app.add_subcommand("validate", "check a file against schema and invariants");
    validate->add_option("file", validatePath, "JSON file")->required();

    try {
        app.parse(argc, argv);
        if (compose->parsed()) return cmdCompose(scriptPath, outPath);
        if (ode->parsed()) return cmdOde(odePath);
        if (simulate->parsed())
            return cmdSimulate(simPath, x0Text, t0, t1, steps, simInflow, simOutflow);
        if (steady->parsed()) return cmdSteady(steadyPath, steadyInflow, steadyOutflow, grid);
        if (reach->parsed()) return cmdReach(reachPath, fromText, toText, depth);
        if (laws->parsed()) return cmdCheckLaws(setSize);
        if (validate->parsed()) return cmdValidate(validatePath);
        return kBadInput;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
}
