#pragma once

// Index and period of the substitution iteration A^1 = A, A^{i+1} = A(A^i/x),
// classical verification, fixpoints of positive formulas, and the crude
// semantic upper bound on the index.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ruitenburg/bisim.hpp"
#include "ruitenburg/bound.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/kripke.hpp"
#include "ruitenburg/prover.hpp"

namespace ruitenburg {

using syntax::Formula;
using syntax::VariableName;

inline constexpr std::size_t kDefaultMaxIndex = 20;

// Countermodel to A^{k+2} <-> A^k (or A^{k+1} <-> A^k for the period witness).
struct Witness {
    std::size_t k = 0;
    std::size_t gap = 2;
    kripke::Model model;
};

struct IndexReport {
    Formula formula;
    VariableName variable;
    std::size_t index = 1;
    std::size_t period = 1;
    std::vector<Formula> iterates;  // A^1 .. A^{index+2}
    std::vector<Witness> witnesses;  // k = 1 .. index-1, gap 2
    std::optional<Witness> periodWitness;  // k = index, gap 1, when period is 2
    bool holdsAtZero = false;  // A^2 <-> x is also provable
};

namespace detail {

inline bool refutes(const kripke::Model& m, const Formula& lhs, const Formula& rhs) {
    return !kripke::forces(m, Formula::iff(lhs, rhs));
}

}  // namespace detail

// A witness refutes the bi-implication for this formula's own iterates.
inline bool witnessHolds(const Witness& w, syntax::IterateSequence& seq) {
    return detail::refutes(w.model, seq.at(w.k + w.gap), seq.at(w.k));
}

inline IndexReport findIndex(const Formula& a, const VariableName& x = "x", std::size_t maxN = kDefaultMaxIndex,
                             const prover::ProverConfig& config = {}) {
    if (maxN == 0) throw InputError("findIndex: maxN must be at least 1");
    syntax::IterateSequence seq(a, x);
    IndexReport r{a, x, 1, 1, {}, {}, std::nullopt, false};
    for (std::size_t n = 1;; ++n) {
        if (n > maxN) {
            throw ContractViolation("no index N <= " + std::to_string(maxN) + " for " + syntax::render(a));
        }
        auto out = prover::proveIPC(Formula::iff(seq.at(n + 2), seq.at(n)), config);
        if (out.provable()) {
            r.index = n;
            break;
        }
        r.witnesses.push_back(Witness{n, 2, std::move(*out.countermodel)});
    }
    auto one = prover::proveIPC(Formula::iff(seq.at(r.index + 1), seq.at(r.index)), config);
    if (one.provable()) {
        r.period = 1;
    } else {
        r.period = 2;
        r.periodWitness = Witness{r.index, 1, std::move(*one.countermodel)};
    }
    r.holdsAtZero = prover::isTheoremIPC(Formula::iff(seq.at(2), seq.at(0)), config);
    for (std::size_t i = 1; i <= r.index + 2; ++i) r.iterates.push_back(seq.at(i));
    return r;
}

// A^3 <-> A classically.
inline bool verifyClassical(const Formula& a, const VariableName& x = "x",
                            std::size_t maxAtoms = prover::kDefaultClassicalAtoms) {
    return prover::proveCPC(Formula::iff(syntax::iterate(a, x, 3), a), maxAtoms);
}

inline constexpr std::size_t kDefaultFixpointSteps = 64;

struct FixpointReport {
    Formula value;
    std::size_t steps = 0;       // value = A^steps(start)
    std::vector<Formula> chain;  // A^0(start) .. A^{steps+1}(start)
};

// Iterates a from `start` until two consecutive terms are equivalent.
inline FixpointReport fixpointFrom(const Formula& a, const VariableName& x, const Formula& start, std::size_t maxN,
                                   const prover::ProverConfig& config = {}) {
    if (!syntax::isPositive(a, x)) {
        throw NotPositiveError("'" + x.str() + "' occurs negatively in " + syntax::render(a));
    }
    FixpointReport r{start, 0, {}};
    r.chain.push_back(start);
    for (std::size_t n = 0;; ++n) {
        if (n >= maxN) throw ContractViolation("fixpoint chain did not stabilize within " + std::to_string(maxN));
        r.chain.push_back(syntax::substitute(a, x, r.chain.back()));
        if (prover::equivIPC(r.chain[n + 1], r.chain[n], config)) {
            r.value = r.chain[n];
            r.steps = n;
            break;
        }
    }
    if (!prover::equivIPC(syntax::substitute(a, x, r.value), r.value, config)) {
        throw ContractViolation("fixpoint check failed for " + syntax::render(a));
    }
    return r;
}

inline FixpointReport leastFixpointReport(const Formula& a, const VariableName& x = "x",
                                          std::size_t maxN = kDefaultFixpointSteps,
                                          const prover::ProverConfig& config = {}) {
    return fixpointFrom(a, x, Formula::bottom(), maxN, config);
}

inline FixpointReport greatestFixpointReport(const Formula& a, const VariableName& x = "x",
                                             std::size_t maxN = kDefaultFixpointSteps,
                                             const prover::ProverConfig& config = {}) {
    return fixpointFrom(a, x, Formula::top(), maxN, config);
}

inline Formula leastFixpoint(const Formula& a, const VariableName& x = "x") { return leastFixpointReport(a, x).value; }
inline Formula greatestFixpoint(const Formula& a, const VariableName& x = "x") {
    return greatestFixpointReport(a, x).value;
}

// N(1) = 1, N(l) = N(l-1) + 2R with R = classCountBound(|L| * 2, n-1)^2 standing
// in for the rank bound, evaluated at the height of L. An upper bound only.
inline BigBound theoreticalBound(const kripke::LabelPoset& L, std::size_t n) {
    if (n == 0) throw InputError("theoreticalBound: n must be at least 1");
    BigBound r = bisim::classCountBound(L.size() * 2, n - 1).squared();
    const std::size_t l = L.height();
    if (l <= 1) return BigBound(1);
    return r * BigBound::Int(2 * (l - 1)) + BigBound::Int(1);
}

}  // namespace ruitenburg
