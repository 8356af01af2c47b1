#pragma once

// JSON and DOT forms of models, traces and index reports.
//
// Model JSON: {"points": [ids], "leq": [[a, b], ...], "atoms": [names],
// "val": {"id": [atom, ...]}} where [a, b] means a <= b. The root is the
// greatest point.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ruitenburg/dynamics.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/kripke.hpp"
#include "ruitenburg/ruitenburg.hpp"

namespace ruitenburg::io {

using json = nlohmann::json;
using kripke::Model;
using kripke::Point;
using kripke::PointSet;

inline json modelToJson(const Model& m) {
    kripke::requireKripke(m);
    const auto& P = m.poset();
    const auto& atoms = m.labels().atoms();
    json j;
    j["points"] = P.ids();
    j["leq"] = json::array();
    for (auto [a, b] : P.covers()) j["leq"].push_back({P.id(a), P.id(b)});
    j["atoms"] = atoms;
    j["val"] = json::object();
    for (Point p = 0; p < P.size(); ++p) {
        json names = json::array();
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if ((m.at(p) >> i) & 1ULL) names.push_back(atoms[i]);
        }
        j["val"][std::to_string(P.id(p))] = names;
    }
    return j;
}

inline Model modelFromJson(const json& j) {
    try {
        if (!j.is_object()) throw ValidationError("model must be a JSON object");
        for (const char* key : {"points", "leq", "atoms", "val"}) {
            if (!j.contains(key)) throw ValidationError(std::string("model is missing \"") + key + "\"");
        }
        auto ids = j.at("points").get<std::vector<kripke::PointId>>();
        std::vector<std::pair<kripke::PointId, kripke::PointId>> leq;
        for (const auto& e : j.at("leq")) {
            if (!e.is_array() || e.size() != 2) throw ValidationError("\"leq\" entries must be pairs");
            leq.emplace_back(e[0].get<kripke::PointId>(), e[1].get<kripke::PointId>());
        }
        auto atoms = j.at("atoms").get<std::vector<std::string>>();
        auto P = kripke::Poset::fromRelation(ids, leq);
        auto L = kripke::LabelPoset::powerset(atoms);
        std::vector<kripke::Label> labels(P.size(), 0);
        for (const auto& [key, names] : j.at("val").items()) {
            kripke::PointId id = 0;
            try {
                std::size_t used = 0;
                id = std::stoll(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::logic_error&) {
                throw ValidationError("\"val\" key '" + key + "' is not a point id");
            }
            auto p = P.indexOf(id);
            if (!p) throw ValidationError("\"val\" names unknown point " + key);
            for (const auto& name : names) {
                auto i = L.atomIndex(name.get<std::string>());
                if (!i) throw ValidationError("point " + key + " carries undeclared atom '" + name.get<std::string>() + "'");
                labels[*p] |= kripke::Label{1} << *i;
            }
        }
        return kripke::makeModel(std::move(P), std::move(atoms), std::move(labels));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model JSON: ") + e.what());
    }
}

inline json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline Model loadModel(const std::string& path) { return modelFromJson(readJsonFile(path)); }

inline void writeText(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

inline void saveModel(const Model& m, const std::string& path) { writeText(path, modelToJson(m).dump(2) + "\n"); }

namespace detail {

inline std::string dotEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string atomSet(const Model& m, Point p) {
    std::string s = "{";
    const auto& atoms = m.labels().atoms();
    bool first = true;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if ((m.at(p) >> i) & 1ULL) {
            if (!first) s += ",";
            s += atoms[i];
            first = false;
        }
    }
    return s + "}";
}

}  // namespace detail

// Covering edges point upward; the root ends up on top.
inline std::string modelToDot(const Model& m, const std::string& name = "model", const PointSet* highlight = nullptr) {
    const auto& P = m.poset();
    std::ostringstream out;
    out << "digraph \"" << detail::dotEscape(name) << "\" {\n  rankdir=BT;\n  node [shape=box];\n";
    for (Point p = 0; p < P.size(); ++p) {
        out << "  p" << P.id(p) << " [label=\"" << P.id(p) << " " << detail::dotEscape(detail::atomSet(m, p)) << "\"";
        if (highlight && highlight->test(p)) out << ", style=filled, fillcolor=lightblue";
        out << "];\n";
    }
    for (auto [a, b] : P.covers()) out << "  p" << P.id(a) << " -> p" << P.id(b) << ";\n";
    out << "}\n";
    return out.str();
}

// --- traces -----------------------------------------------------------------

inline json pointList(const kripke::Poset& P, const PointSet& s) {
    json j = json::array();
    s.forEach([&](Point p) { j.push_back(P.id(p)); });
    return j;
}

inline json uToJson(const kripke::Poset& P, const PointSet& u) {
    json j = json::object();
    for (Point p = 0; p < P.size(); ++p) j[std::to_string(P.id(p))] = u.test(p) ? 1 : 0;
    return j;
}

inline json traceToJson(const dynamics::IterationTrace& t) {
    const auto& P = t.poset();
    json j;
    j["formula"] = syntax::render(t.formula());
    j["variable"] = t.variable().str();
    j["model"] = modelToJson(t.fusedAt(0));
    j["steps"] = json::array();
    for (std::size_t k = 0; k < t.steps().size(); ++k) j["steps"].push_back({{"k", k}, {"u", uToJson(P, t.at(k))}});

    const std::size_t n = dynamics::bIndex(t.formula());
    dynamics::TypeAnalysis types(t, n);
    json a;
    a["index"] = t.index();
    a["period"] = t.period();
    a["rankDepth"] = n;
    a["perPointIndex"] = json::object();
    for (Point p = 0; p < P.size(); ++p) a["perPointIndex"][std::to_string(P.id(p))] = t.perPointIndex(p);
    a["steps"] = json::array();
    for (std::size_t k = 0; k <= t.index(); ++k) {
        json s;
        s["k"] = k;
        s["periodic"] = pointList(P, dynamics::periodicPoints(t, k));
        s["frontier"] = pointList(P, dynamics::frontierPoints(t, k));
        auto e = dynamics::partitionE(t, k, P.root());
        s["partition"] = {{"per", pointList(P, e.periodic)},
                          {"zero", pointList(P, e.zero)},
                          {"one", pointList(P, e.one)},
                          {"mixed", pointList(P, e.mixed)}};
        json ranks = json::object();
        for (Point p = 0; p < P.size(); ++p) ranks[std::to_string(P.id(p))] = types.rank(k, p);
        s["ranks"] = ranks;
        a["steps"].push_back(s);
    }
    j["analysis"] = a;
    return j;
}

// Rebuilds a trace from its JSON form by re-running the iteration and checks
// that the recorded steps agree.
inline dynamics::IterationTrace traceFromJson(const json& j) {
    try {
        auto a = syntax::parse(j.at("formula").get<std::string>());
        syntax::VariableName x(j.at("variable").get<std::string>());
        auto m = modelFromJson(j.at("model"));
        auto t = dynamics::iterateModel(a, x, dynamics::split(m, x));
        const auto& P = t.poset();
        const auto& steps = j.at("steps");
        if (steps.size() != t.steps().size()) throw ValidationError("trace JSON has the wrong number of steps");
        for (std::size_t k = 0; k < steps.size(); ++k) {
            for (const auto& [key, value] : steps[k].at("u").items()) {
                auto p = P.indexOf(std::stoll(key));
                if (!p) throw ValidationError("trace JSON names unknown point " + key);
                if ((value.get<int>() == 1) != t.at(k).test(*p)) {
                    throw ValidationError("trace JSON disagrees with the iteration at step " + std::to_string(k) +
                                          ", point " + key);
                }
            }
        }
        return t;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed trace JSON: ") + e.what());
    }
}

// One DOT frame per stored step; points with u = 1 are filled.
inline std::string traceToDot(const dynamics::IterationTrace& t) {
    std::string out;
    for (std::size_t k = 0; k < t.steps().size(); ++k) {
        out += modelToDot(t.fusedAt(k), "step " + std::to_string(k), &t.at(k));
    }
    return out;
}

// --- index reports ----------------------------------------------------------

inline json witnessToJson(const Witness& w) { return {{"k", w.k}, {"gap", w.gap}, {"model", modelToJson(w.model)}}; }

inline json indexReportToJson(const IndexReport& r) {
    json j;
    j["formula"] = syntax::render(r.formula);
    j["variable"] = r.variable.str();
    j["index"] = r.index;
    j["period"] = r.period;
    j["holdsAtZero"] = r.holdsAtZero;
    j["iterates"] = json::array();
    for (const auto& f : r.iterates) j["iterates"].push_back(syntax::render(f));
    j["witnesses"] = json::array();
    for (const auto& w : r.witnesses) j["witnesses"].push_back(witnessToJson(w));
    j["periodWitness"] = r.periodWitness ? witnessToJson(*r.periodWitness) : json(nullptr);
    return j;
}

}  // namespace ruitenburg::io
