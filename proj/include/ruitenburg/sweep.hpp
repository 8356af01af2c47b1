#pragma once

// Exhaustive checks over a list of formulas: index search, the model sweep of
// traces over small rooted posets, and prover self-consistency. Each returns
// counts plus every violation found, with enough data to reproduce it.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ruitenburg/dynamics.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/io.hpp"
#include "ruitenburg/kripke.hpp"
#include "ruitenburg/prover.hpp"
#include "ruitenburg/ruitenburg.hpp"

namespace ruitenburg::sweep {

using syntax::Formula;
using syntax::VariableName;

struct Violation {
    std::string formula;
    std::string message;
    std::string reproducer;  // model JSON when a model is involved
};

struct IndexRow {
    Formula formula;
    std::size_t index = 0;
    std::size_t period = 0;
    bool holdsAtZero = false;
};

struct IndexSweep {
    std::vector<IndexRow> rows;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> histogram;  // (index, period) -> count
    std::size_t witnessesChecked = 0;
    std::vector<Violation> violations;
};

// findIndex on every formula, with every witness re-checked by forcing.
inline IndexSweep indexSweep(std::span<const Formula> formulas, const VariableName& x, std::size_t maxN,
                             const prover::ProverConfig& config = {}) {
    IndexSweep out;
    for (const auto& a : formulas) {
        try {
            auto r = findIndex(a, x, maxN, config);
            syntax::IterateSequence seq(a, x);
            auto check = [&](const Witness& w) {
                ++out.witnessesChecked;
                if (!witnessHolds(w, seq)) {
                    out.violations.push_back({syntax::render(a),
                                              "witness for k=" + std::to_string(w.k) + " does not refute",
                                              io::modelToJson(w.model).dump()});
                }
            };
            for (const auto& w : r.witnesses) check(w);
            if (r.periodWitness) check(*r.periodWitness);
            if (r.period > 2) out.violations.push_back({syntax::render(a), "period above 2", ""});
            out.histogram[{r.index, r.period}] += 1;
            out.rows.push_back({a, r.index, r.period, r.holdsAtZero});
        } catch (const ContractViolation& e) {
            out.violations.push_back({syntax::render(a), e.what(), ""});
        }
    }
    return out;
}

struct ModelSweep {
    std::size_t posets = 0;
    std::size_t traces = 0;
    std::size_t frontierChecks = 0;     // frontier configurations checked
    std::size_t clauseTwoInstances = 0; // frontier points with u_k = 1
    std::size_t maxIndex = 0;
    std::map<std::size_t, std::size_t> indexHistogram;
    std::vector<Violation> violations;
};

inline constexpr std::size_t kSweepMaxSteps = 256;

namespace detail {

inline std::string reproducer(const kripke::Poset& P, const std::vector<std::string>& atoms,
                              std::span<const std::uint64_t> masks) {
    std::vector<kripke::Label> labels(P.size(), 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        for (kripke::Point p = 0; p < P.size(); ++p) {
            if ((masks[i] >> p) & 1ULL) labels[p] |= kripke::Label{1} << i;
        }
    }
    return io::modelToJson(kripke::makeModel(P, atoms, std::move(labels))).dump();
}

inline bool mentionsOnly(const Formula& a, const std::vector<std::string>& atoms) {
    for (const auto& v : syntax::atoms(a)) {
        if (std::find(atoms.begin(), atoms.end(), v.str()) == atoms.end()) return false;
    }
    return true;
}

}  // namespace detail

// Every rooted poset with at most maxPoints points (up to isomorphism), every
// evaluation of each side-atom set, every x-part and every formula whose atoms
// fit. Checks index <= height, period in {1, 2}, and on every frontier point f
// at step k: f is periodic at k + 1, and u_k(f) = 1 forces u_{k+1}(f) = 0.
inline ModelSweep modelSweep(std::span<const Formula> formulas, const VariableName& x, std::size_t maxPoints,
                             const std::vector<std::vector<std::string>>& sideAtomSets) {
    ModelSweep out;
    kripke::ForcingEvaluator ev;
    auto posets = kripke::enumerateRootedPosets(maxPoints);
    out.posets = posets.size();
    for (const auto& side : sideAtomSets) {
        std::vector<std::string> atoms = side;
        atoms.push_back(x.str());
        std::vector<std::pair<Formula, kripke::CompiledFormula>> compiled;
        for (const auto& a : formulas) {
            if (detail::mentionsOnly(a, atoms)) compiled.emplace_back(a, kripke::CompiledFormula(a, atoms));
        }
        for (const auto& P : posets) {
            const std::size_t h = kripke::height(P);
            std::vector<std::uint64_t> ds;
            for (const auto& d : kripke::downsets(P)) ds.push_back(d.words()[0]);
            std::vector<std::size_t> choice(side.size(), 0);
            std::vector<std::uint64_t> masks(atoms.size(), 0);
            std::vector<std::uint64_t> steps;
            while (true) {
                for (std::size_t i = 0; i < side.size(); ++i) masks[i] = ds[choice[i]];
                for (const auto& [a, cf] : compiled) {
                    for (std::uint64_t u0 : ds) {
                        ++out.traces;
                        steps.assign(1, u0);
                        std::size_t index = 0;
                        std::size_t period = 0;
                        for (std::size_t k = 1; k <= kSweepMaxSteps && period == 0; ++k) {
                            masks.back() = steps.back();
                            steps.push_back(ev.evaluateSmall(cf, P, masks));
                            if (steps[k] == steps[k - 1]) {
                                index = k - 1;
                                period = 1;
                            } else if (k >= 2 && steps[k] == steps[k - 2]) {
                                index = k - 2;
                                period = 2;
                            } else if (std::find(steps.begin(), steps.end() - 1, steps[k]) != steps.end() - 1) {
                                period = 3;
                            }
                        }
                        masks.back() = u0;
                        if (period == 0 || period > 2) {
                            out.violations.push_back({syntax::render(a), "no repeat with period at most 2",
                                                      detail::reproducer(P, atoms, masks)});
                            continue;
                        }
                        out.maxIndex = std::max(out.maxIndex, index);
                        out.indexHistogram[index] += 1;
                        if (index > h) {
                            out.violations.push_back({syntax::render(a),
                                                      "index " + std::to_string(index) + " exceeds height " +
                                                          std::to_string(h),
                                                      detail::reproducer(P, atoms, masks)});
                        }
                        auto at = [&](std::size_t k) {
                            return k < steps.size() ? steps[k] : steps[index + (k - index) % period];
                        };
                        auto periodic = [&](std::size_t k) {
                            std::uint64_t diff = at(k + 2) ^ at(k);
                            std::uint64_t s = 0;
                            for (kripke::Point p = 0; p < P.size(); ++p) {
                                if ((diff & P.downMask(p)) == 0) s |= 1ULL << p;
                            }
                            return s;
                        };
                        for (std::size_t k = 0; k < index; ++k) {
                            const std::uint64_t per = periodic(k);
                            const std::uint64_t next = periodic(k + 1);
                            for (kripke::Point f = 0; f < P.size(); ++f) {
                                if ((per >> f) & 1ULL) continue;
                                const std::uint64_t below = P.downMask(f) & ~(1ULL << f);
                                if ((below & ~per) != 0) continue;
                                ++out.frontierChecks;
                                if (((next >> f) & 1ULL) == 0) {
                                    out.violations.push_back({syntax::render(a),
                                                              "frontier point not periodic one step later (k=" +
                                                                  std::to_string(k) + ")",
                                                              detail::reproducer(P, atoms, masks)});
                                }
                                if ((at(k) >> f) & 1ULL) {
                                    ++out.clauseTwoInstances;
                                    if ((at(k + 1) >> f) & 1ULL) {
                                        out.violations.push_back({syntax::render(a),
                                                                  "frontier point keeps value 1 (k=" +
                                                                      std::to_string(k) + ")",
                                                                  detail::reproducer(P, atoms, masks)});
                                    }
                                }
                            }
                        }
                    }
                }
                std::size_t i = 0;
                while (i < choice.size() && ++choice[i] == ds.size()) choice[i++] = 0;
                if (i == choice.size()) break;
            }
        }
    }
    return out;
}

struct ProverSweep {
    std::size_t provable = 0;
    std::size_t refuted = 0;
    std::vector<Violation> violations;
};

// proveIPC against exhaustive countermodel search, and IPC => CPC.
inline ProverSweep proverSweep(std::span<const Formula> formulas, std::size_t maxNodes,
                               const prover::ProverConfig& config = {}) {
    ProverSweep out;
    for (const auto& a : formulas) {
        auto verdict = prover::proveIPC(a, config);
        auto found = prover::countermodelSearch(a, maxNodes);
        if (verdict.provable()) {
            ++out.provable;
            if (found) {
                out.violations.push_back({syntax::render(a), "provable but a countermodel exists",
                                          io::modelToJson(*found).dump()});
            }
            if (!prover::proveCPC(a)) out.violations.push_back({syntax::render(a), "provable but not classical", ""});
        } else {
            ++out.refuted;
            if (!found) {
                out.violations.push_back({syntax::render(a),
                                          "refuted but no countermodel with at most " + std::to_string(maxNodes) +
                                              " points",
                                          io::modelToJson(*verdict.countermodel).dump()});
            }
        }
    }
    return out;
}

}  // namespace ruitenburg::sweep
