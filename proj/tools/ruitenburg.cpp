// Command-line front end: index, prove, simulate, corpus, fixpoint.
//
// Exit codes: 0 success, 1 usage or input error, 2 contract violation or
// exhausted budget.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ruitenburg/corpus.hpp"
#include "ruitenburg/dynamics.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/io.hpp"
#include "ruitenburg/kripke.hpp"
#include "ruitenburg/prover.hpp"
#include "ruitenburg/ruitenburg.hpp"
#include "ruitenburg/sweep.hpp"

namespace {

using namespace ruitenburg;
using io::json;

enum class Format { Text, Json, Dot };

struct RunConfig {
    std::string variable = "x";
    std::size_t maxIter = 0;  // 0: command default
    std::size_t maxNodes = 0;
    std::string format = "text";
    std::string out;
    std::uint64_t seed = 1;
    std::size_t connectives = 3;
    std::string atoms = "x,y";
    std::size_t points = 0;
    std::size_t sample = 0;
    std::optional<Deadline> deadline;

    Format fmt() const {
        if (format == "json") return Format::Json;
        if (format == "dot") return Format::Dot;
        return Format::Text;
    }

    prover::ProverConfig prover() const {
        prover::ProverConfig c;
        if (deadline) c.deadline = &*deadline;
        return c;
    }

    const Deadline* deadlinePtr() const { return deadline ? &*deadline : nullptr; }
};

// Writes to --out when given, else stdout.
void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        io::writeText(cfg.out, text);
    }
}

std::string renderSugar(const syntax::Formula& f) { return syntax::render(f, {.sugar = true}); }

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmdIndex(const std::string& text, const RunConfig& cfg) {
    auto a = syntax::parse(text);
    auto r = findIndex(a, syntax::VariableName(cfg.variable), cfg.maxIter ? cfg.maxIter : kDefaultMaxIndex,
                       cfg.prover());
    if (cfg.fmt() == Format::Json) {
        emit(cfg, io::indexReportToJson(r).dump(2) + "\n");
        return 0;
    }
    std::ostringstream out;
    out << "formula: " << renderSugar(a) << "\n";
    out << "variable: " << cfg.variable << "\n";
    out << "N=" << r.index << ", period=" << r.period << "\n";
    for (std::size_t i = 0; i < r.iterates.size(); ++i) {
        out << "  A^" << i + 1 << " = " << renderSugar(r.iterates[i]) << "\n";
    }
    for (const auto& w : r.witnesses) {
        out << "  A^" << w.k + 2 << " <-> A^" << w.k << " refuted by a " << w.model.size() << "-point model\n";
    }
    if (r.periodWitness) {
        out << "  A^" << r.index + 1 << " <-> A^" << r.index << " refuted by a " << r.periodWitness->model.size()
            << "-point model\n";
    }
    out << "N=0 also works: " << (r.holdsAtZero ? "yes" : "no") << "\n";
    emit(cfg, out.str());
    return 0;
}

int cmdProve(const std::string& text, const RunConfig& cfg) {
    auto a = syntax::parse(text);
    auto r = prover::proveIPC(a, cfg.prover());
    const char* verdict = r.provable() ? "provable" : "refuted";
    std::optional<bool> searchFound;
    if (cfg.maxNodes != 0) {
        searchFound = prover::countermodelSearch(a, cfg.maxNodes).has_value();
        if (*searchFound == r.provable()) {
            throw ContractViolation("countermodel search up to " + std::to_string(cfg.maxNodes) +
                                    " points disagrees with the prover");
        }
    }
    if (cfg.fmt() == Format::Json) {
        json j{{"formula", syntax::render(a)}, {"verdict", verdict}};
        j["countermodel"] = r.countermodel ? io::modelToJson(*r.countermodel) : json(nullptr);
        if (searchFound) j["searchAgrees"] = true;
        emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    std::cout << verdict << "\n";
    if (searchFound) std::cout << "countermodel search up to " << cfg.maxNodes << " points agrees\n";
    if (!r.countermodel) return 0;
    std::string body = cfg.fmt() == Format::Dot ? io::modelToDot(*r.countermodel, "countermodel")
                                                : io::modelToJson(*r.countermodel).dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << body;
    } else {
        io::writeText(cfg.out, body);
    }
    return 0;
}

int cmdSimulate(const std::string& modelPath, const std::string& text, const RunConfig& cfg) {
    auto m = io::loadModel(modelPath);
    auto a = syntax::parse(text);
    syntax::VariableName x(cfg.variable);
    auto t = dynamics::iterateModel(a, x, dynamics::split(m, x), cfg.maxIter ? cfg.maxIter : dynamics::kDefaultMaxSteps,
                                    cfg.deadlinePtr());
    if (cfg.fmt() == Format::Json) {
        emit(cfg, io::traceToJson(t).dump(2) + "\n");
        return 0;
    }
    if (cfg.fmt() == Format::Dot) {
        emit(cfg, io::traceToDot(t));
        return 0;
    }
    const auto& P = t.poset();
    auto ids = [&](const kripke::PointSet& s) {
        std::string r = "{";
        bool first = true;
        s.forEach([&](kripke::Point p) {
            r += (first ? "" : ",") + std::to_string(P.id(p));
            first = false;
        });
        return r + "}";
    };
    std::ostringstream out;
    out << "index=" << t.index() << ", period=" << t.period() << ", height=" << kripke::height(P) << "\n";
    dynamics::TypeAnalysis types(t, dynamics::bIndex(a));
    for (std::size_t k = 0; k < t.steps().size(); ++k) {
        out << "u_" << k << ": x holds at " << ids(t.at(k));
        if (k <= t.index()) {
            auto e = dynamics::partitionE(t, k, P.root());
            out << "; frontier " << ids(dynamics::frontierPoints(t, k)) << "; E_per " << ids(e.periodic) << " E_0 "
                << ids(e.zero) << " E_1 " << ids(e.one) << " E_01 " << ids(e.mixed) << "; root rank "
                << types.rank(k, P.root());
        }
        out << "\n";
    }
    emit(cfg, out.str());
    return 0;
}

int cmdCorpus(const RunConfig& cfg) {
    auto leaves = splitList(cfg.atoms);
    corpus::Corpus c(leaves, cfg.connectives);
    std::vector<syntax::Formula> formulas;
    std::vector<std::size_t> ids;
    if (cfg.sample != 0 && cfg.sample < c.size()) {
        std::mt19937_64 rng(cfg.seed);
        std::vector<std::size_t> all(c.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::shuffle(all.begin(), all.end(), rng);
        all.resize(cfg.sample);
        std::sort(all.begin(), all.end());
        ids = all;
    } else {
        for (std::size_t i = 0; i < c.size(); ++i) ids.push_back(i);
    }
    for (auto i : ids) formulas.push_back(c[i].formula);

    syntax::VariableName x(cfg.variable);
    auto idx = sweep::indexSweep(formulas, x, cfg.maxIter ? cfg.maxIter : kDefaultMaxIndex, cfg.prover());
    std::vector<sweep::Violation> violations = idx.violations;

    std::optional<sweep::ModelSweep> ms;
    if (cfg.points != 0) {
        std::vector<std::vector<std::string>> sides{{}};
        for (const auto& l : leaves) {
            if (l != cfg.variable) sides.push_back({l});
        }
        ms = sweep::modelSweep(formulas, x, cfg.points, sides);
        violations.insert(violations.end(), ms->violations.begin(), ms->violations.end());
    }
    std::optional<sweep::ProverSweep> ps;
    if (cfg.maxNodes != 0) {
        ps = sweep::proverSweep(formulas, cfg.maxNodes, cfg.prover());
        violations.insert(violations.end(), ps->violations.begin(), ps->violations.end());
    }

    if (cfg.fmt() == Format::Json) {
        json j;
        j["formulas"] = json::array();
        for (std::size_t i = 0; i < idx.rows.size(); ++i) {
            const auto& r = idx.rows[i];
            j["formulas"].push_back({{"id", ids[i]}, {"formula", syntax::render(r.formula)}, {"index", r.index},
                                     {"period", r.period}, {"holdsAtZero", r.holdsAtZero}});
        }
        j["histogram"] = json::array();
        for (const auto& [key, n] : idx.histogram) {
            j["histogram"].push_back({{"index", key.first}, {"period", key.second}, {"count", n}});
        }
        j["witnessesChecked"] = idx.witnessesChecked;
        if (ms) {
            j["modelSweep"] = {{"posets", ms->posets}, {"traces", ms->traces}, {"maxIndex", ms->maxIndex},
                               {"frontierChecks", ms->frontierChecks}};
        }
        if (ps) j["proverSweep"] = {{"provable", ps->provable}, {"refuted", ps->refuted}};
        j["violations"] = json::array();
        for (const auto& v : violations) {
            j["violations"].push_back({{"formula", v.formula}, {"message", v.message}, {"reproducer", v.reproducer}});
        }
        emit(cfg, j.dump(2) + "\n");
    } else {
        std::ostringstream out;
        for (std::size_t i = 0; i < idx.rows.size(); ++i) {
            const auto& r = idx.rows[i];
            out << ids[i] << "\tN=" << r.index << "\tperiod=" << r.period << "\t" << renderSugar(r.formula) << "\n";
        }
        out << "formulas: " << idx.rows.size() << "\n";
        for (const auto& [key, n] : idx.histogram) {
            out << "  N=" << key.first << " period=" << key.second << ": " << n << "\n";
        }
        out << "witnesses checked: " << idx.witnessesChecked << "\n";
        if (ms) {
            out << "model sweep: " << ms->posets << " posets, " << ms->traces << " traces, max index " << ms->maxIndex
                << ", " << ms->frontierChecks << " frontier checks\n";
        }
        if (ps) out << "prover sweep: " << ps->provable << " provable, " << ps->refuted << " refuted\n";
        out << "violations: " << violations.size() << "\n";
        for (const auto& v : violations) {
            out << "  " << v.formula << ": " << v.message;
            if (!v.reproducer.empty()) out << "\n    " << v.reproducer;
            out << "\n";
        }
        emit(cfg, out.str());
    }
    return violations.empty() ? 0 : 2;
}

int cmdFixpoint(const std::string& text, bool greatest, const RunConfig& cfg) {
    auto a = syntax::parse(text);
    syntax::VariableName x(cfg.variable);
    const std::size_t maxN = cfg.maxIter ? cfg.maxIter : kDefaultFixpointSteps;
    auto r = greatest ? greatestFixpointReport(a, x, maxN, cfg.prover()) : leastFixpointReport(a, x, maxN, cfg.prover());
    const char* name = greatest ? "nu" : "mu";
    if (cfg.fmt() == Format::Json) {
        json j{{"formula", syntax::render(a)}, {"kind", greatest ? "greatest" : "least"},
               {"fixpoint", syntax::render(r.value)}, {"steps", r.steps}, {"verified", true}};
        emit(cfg, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream out;
    out << renderSugar(r.value) << "\n";
    out << "reached after " << r.steps << " step" << (r.steps == 1 ? "" : "s") << "\n";
    out << "A(" << name << ")<->" << name << ": provable\n";
    emit(cfg, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Index and period of substitution iterates in intuitionistic logic"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--var", cfg.variable, "Iterated variable")->capture_default_str();
        sub->add_option("--max-iter", cfg.maxIter, "Iteration budget")->check(CLI::PositiveNumber);
        sub->add_option("--max-nodes", cfg.maxNodes, "Cross-check with countermodel search up to this many points")
            ->check(CLI::Range(1, 7));
        sub->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"text", "json", "dot"}))
            ->capture_default_str();
        sub->add_option("--out", cfg.out, "Output file");
        sub->add_option("--seed", cfg.seed, "Seed for sampled runs")->capture_default_str();
    };

    std::string formula;
    std::string modelPath;
    bool least = false;
    bool greatest = false;

    auto* index = app.add_subcommand("index", "Least N with A^(N+2) <-> A^N provable");
    index->add_option("formula", formula)->required();
    common(index);

    auto* prove = app.add_subcommand("prove", "Decide a formula in IPC");
    prove->add_option("formula", formula)->required();
    common(prove);

    auto* simulate = app.add_subcommand("simulate", "Iterate a formula on a model");
    simulate->add_option("model", modelPath)->required()->check(CLI::ExistingFile);
    simulate->add_option("formula", formula)->required();
    common(simulate);

    auto* corpusCmd = app.add_subcommand("corpus", "Sweep all small formulas");
    common(corpusCmd);
    corpusCmd->add_option("--connectives", cfg.connectives, "Largest connective count")->capture_default_str();
    corpusCmd->add_option("--atoms", cfg.atoms, "Comma-separated atoms")->capture_default_str();
    corpusCmd->add_option("--points", cfg.points, "Model sweep over rooted posets up to this size (0: off)")
        ->check(CLI::Range(0, 7));
    corpusCmd->add_option("--sample", cfg.sample, "Random sample of this many formulas (0: all)");

    auto* fixpoint = app.add_subcommand("fixpoint", "Least or greatest fixpoint of a positive formula");
    fixpoint->add_option("formula", formula)->required();
    auto* leastFlag = fixpoint->add_flag("--least", least, "Iterate from false");
    fixpoint->add_flag("--greatest", greatest, "Iterate from true")->excludes(leastFlag);
    common(fixpoint);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (const char* budget = std::getenv("RUITENBURG_BUDGET_MS")) {
        try {
            cfg.deadline.emplace(std::chrono::milliseconds(std::stoll(budget)));
        } catch (const std::exception&) {
            std::cerr << "error: RUITENBURG_BUDGET_MS must be an integer\n";
            return 1;
        }
    }

    try {
        if (index->parsed()) return cmdIndex(formula, cfg);
        if (prove->parsed()) return cmdProve(formula, cfg);
        if (simulate->parsed()) return cmdSimulate(modelPath, formula, cfg);
        if (corpusCmd->parsed()) return cmdCorpus(cfg);
        if (fixpoint->parsed()) return cmdFixpoint(formula, greatest, cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ResourceLimit& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return 2;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
