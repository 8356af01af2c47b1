#pragma once

// The map psi = <pi_0, chi> induced by a formula on paired evaluations (v, u):
// v is a Kripke model for the side atoms, u a 2-evaluation for the iterated
// variable, and chi(v, u)(p) = 1 iff p forces the formula in the fused model.
//
// In 2 = {0, 1} the order is 1 <= 0, so {p | u(p) = 1} is a downset and is
// exactly the extension of the variable in the fused model.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ruitenburg/bisim.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/kripke.hpp"

namespace ruitenburg::dynamics {

using kripke::Evaluation;
using kripke::LabelPoset;
using kripke::Model;
using kripke::Point;
using kripke::PointSet;
using kripke::Poset;
using syntax::Formula;
using syntax::VariableName;

inline const std::shared_ptr<const LabelPoset>& twoLabels() {
    static const auto two = std::make_shared<const LabelPoset>(LabelPoset::two());
    return two;
}

// The 2-evaluation taking value 1 exactly on `ones`.
inline Evaluation twoEvaluation(const Poset& P, const PointSet& ones) {
    std::vector<kripke::Label> values(P.size(), 0);
    ones.forEach([&](Point p) { values[p] = 1; });
    return Evaluation(P, twoLabels(), std::move(values));
}

inline PointSet onesOf(const Evaluation& u) {
    if (!(u.labels() == *twoLabels())) throw ValidationError("expected an evaluation into 2");
    PointSet s(u.size());
    for (Point p = 0; p < u.size(); ++p) {
        if (u.at(p) == 1) s.set(p);
    }
    return s;
}

class PairedEvaluation {
public:
    PairedEvaluation(Evaluation v, Evaluation u) : v_(std::move(v)), u_(std::move(u)) {
        kripke::requireKripke(v_);
        if (!(u_.labels() == *twoLabels())) throw ValidationError("the x-part must be an evaluation into 2");
        if (!(v_.poset() == u_.poset())) throw ValidationError("paired evaluations must share one poset");
    }
    PairedEvaluation(Evaluation v, const PointSet& ones) : PairedEvaluation(v, twoEvaluation(v.poset(), ones)) {}

    const Evaluation& v() const noexcept { return v_; }
    const Evaluation& u() const noexcept { return u_; }
    const Poset& poset() const noexcept { return v_.poset(); }
    std::size_t size() const noexcept { return v_.size(); }
    PointSet ones() const { return onesOf(u_); }

    PairedEvaluation withU(const PointSet& ones) const { return PairedEvaluation(v_, ones); }

private:
    Evaluation v_;
    Evaluation u_;
};

namespace detail {

inline std::vector<std::string> fusedAtoms(const LabelPoset& L, const VariableName& x) {
    std::vector<std::string> atoms = L.atoms();
    if (std::find(atoms.begin(), atoms.end(), x.str()) != atoms.end()) {
        throw ValidationError("variable '" + x.str() + "' already labels the frozen part");
    }
    atoms.push_back(x.str());
    return atoms;
}

}  // namespace detail

// Point p is labeled v(p), plus x when u(p) = 1.
inline Model fuse(const PairedEvaluation& m, const VariableName& x) {
    auto atoms = detail::fusedAtoms(m.v().labels(), x);
    const kripke::Label bit = kripke::Label{1} << (atoms.size() - 1);
    std::vector<kripke::Label> labels(m.size());
    for (Point p = 0; p < m.size(); ++p) labels[p] = m.v().at(p) | (m.u().at(p) == 1 ? bit : 0);
    return kripke::makeModel(m.poset(), std::move(atoms), std::move(labels));
}

inline PairedEvaluation split(const Model& m, const VariableName& x) {
    kripke::requireKripke(m);
    auto idx = m.labels().atomIndex(x.str());
    if (!idx) throw AtomError("model does not interpret '" + x.str() + "'");
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < m.labels().atoms().size(); ++i) {
        if (i != *idx) rest.push_back(m.labels().atoms()[i]);
    }
    std::vector<kripke::Label> vLabels(m.size());
    PointSet ones(m.size());
    for (Point p = 0; p < m.size(); ++p) {
        kripke::Label l = m.at(p);
        if ((l >> *idx) & 1ULL) ones.set(p);
        kripke::Label low = l & ((kripke::Label{1} << *idx) - 1);
        kripke::Label high = (l >> (*idx + 1)) << *idx;
        vLabels[p] = low | high;
    }
    return PairedEvaluation(kripke::makeModel(m.poset(), std::move(rest), std::move(vLabels)), ones);
}

// chi for a fixed formula and frozen part, applied repeatedly to x-parts.
class Chi {
public:
    Chi(const Formula& a, const VariableName& x, const Evaluation& v)
        : poset_(v.poset()), cf_(a, detail::fusedAtoms(v.labels(), x)), ext_(kripke::atomExtensions(v)) {
        ext_.emplace_back(v.size());
        masks_.resize(ext_.size());
        for (std::size_t i = 0; i + 1 < ext_.size(); ++i) masks_[i] = poset_.small() ? ext_[i].words()[0] : 0;
    }

    const Poset& poset() const noexcept { return poset_; }

    PointSet step(const PointSet& u) {
        if (poset_.small()) {
            PointSet out(poset_.size());
            out.words()[0] = stepSmall(u.words()[0]);
            return out;
        }
        ext_.back() = u;
        return ev_.evaluate(cf_, poset_, ext_);
    }

    std::uint64_t stepSmall(std::uint64_t u) {
        masks_.back() = u;
        return ev_.evaluateSmall(cf_, poset_, masks_);
    }

private:
    Poset poset_;
    kripke::CompiledFormula cf_;
    std::vector<PointSet> ext_;
    std::vector<std::uint64_t> masks_;
    kripke::ForcingEvaluator ev_;
};

inline Evaluation chiStep(const Formula& a, const VariableName& x, const PairedEvaluation& m) {
    Chi chi(a, x, m.v());
    return twoEvaluation(m.poset(), chi.step(m.ones()));
}

inline constexpr std::size_t kDefaultMaxSteps = 10'000;

class IterationTrace;
IterationTrace iterateModel(const Formula& a, const VariableName& x, const PairedEvaluation& m,
                            std::size_t maxSteps, const Deadline* deadline);

// u_0, u_1, ... up to the first whole-model repeat. Steps past the stored
// prefix are answered by periodicity.
class IterationTrace {
public:
    const Formula& formula() const noexcept { return a_; }
    const VariableName& variable() const noexcept { return x_; }
    const Evaluation& frozen() const noexcept { return v_; }
    const Poset& poset() const noexcept { return v_.poset(); }

    // u_0 .. u_{index + period}
    const std::vector<PointSet>& steps() const noexcept { return steps_; }
    std::size_t index() const noexcept { return index_; }
    std::size_t period() const noexcept { return period_; }

    // Position of u_k inside the stored prefix.
    std::size_t reduce(std::size_t k) const noexcept {
        if (k < index_ + period_) return k;
        return index_ + (k - index_) % period_;
    }
    const PointSet& at(std::size_t k) const { return steps_[reduce(k)]; }
    Evaluation evaluationAt(std::size_t k) const { return twoEvaluation(poset(), at(k)); }
    PairedEvaluation pairedAt(std::size_t k) const { return PairedEvaluation(v_, at(k)); }
    Model fusedAt(std::size_t k) const { return fuse(pairedAt(k), x_); }

    // Least k at which p is periodic.
    std::size_t perPointIndex(Point p) const {
        if (p >= poset().size()) throw InputError("unknown point " + std::to_string(p));
        return perPoint_[p];
    }
    const std::vector<std::size_t>& perPointIndices() const noexcept { return perPoint_; }

    bool periodicAt(Point p, std::size_t k) const { return perPointIndex(p) <= k; }

private:
    friend IterationTrace iterateModel(const Formula&, const VariableName&, const PairedEvaluation&, std::size_t,
                                       const Deadline*);
    IterationTrace(Formula a, VariableName x, Evaluation v) : a_(std::move(a)), x_(std::move(x)), v_(std::move(v)) {}

    Formula a_;
    VariableName x_;
    Evaluation v_;
    std::vector<PointSet> steps_;
    std::size_t index_ = 0;
    std::size_t period_ = 1;
    std::vector<std::size_t> perPoint_;
};

inline IterationTrace iterateModel(const Formula& a, const VariableName& x, const PairedEvaluation& m,
                                   std::size_t maxSteps = kDefaultMaxSteps, const Deadline* deadline = nullptr) {
    IterationTrace t(a, x, m.v());
    Chi chi(a, x, m.v());
    t.steps_.push_back(m.ones());
    for (std::size_t k = 1;; ++k) {
        if (k > maxSteps) {
            throw ContractViolation("no repeat of the x-part within " + std::to_string(maxSteps) + " steps");
        }
        if (deadline) deadline->check("iterateModel");
        t.steps_.push_back(chi.step(t.steps_.back()));
        const auto& last = t.steps_.back();
        if (last == t.steps_[k - 1]) {
            t.index_ = k - 1;
            t.period_ = 1;
            break;
        }
        if (k >= 2 && last == t.steps_[k - 2]) {
            t.index_ = k - 2;
            t.period_ = 2;
            break;
        }
        for (std::size_t i = 0; i + 2 < k; ++i) {
            if (last == t.steps_[i]) {
                throw ContractViolation("x-part repeats with period " + std::to_string(k - i));
            }
        }
    }
    const auto& P = t.poset();
    t.perPoint_.assign(P.size(), t.index_);
    for (Point p = 0; p < P.size(); ++p) {
        for (std::size_t k = 0; k < t.index_; ++k) {
            if (!((t.at(k + 2) - t.at(k)) | (t.at(k) - t.at(k + 2))).intersects(P.down(p))) {
                t.perPoint_[p] = k;
                break;
            }
        }
    }
    return t;
}

// (u_{k+2}) and (u_k) agree on the downset of p.
inline bool isPeriodicPoint(const IterationTrace& t, Point p, std::size_t k) { return t.periodicAt(p, k); }

inline PointSet periodicPoints(const IterationTrace& t, std::size_t k) {
    PointSet s(t.poset().size());
    for (Point p = 0; p < t.poset().size(); ++p) {
        if (t.periodicAt(p, k)) s.set(p);
    }
    return s;
}

// Non-periodic points all of whose strict predecessors are periodic.
inline PointSet frontierPoints(const IterationTrace& t, std::size_t k) {
    const auto& P = t.poset();
    PointSet per = periodicPoints(t, k);
    PointSet out(P.size());
    for (Point p = 0; p < P.size(); ++p) {
        if (!per.test(p) && P.strictlyBelow(p).isSubsetOf(per)) out.set(p);
    }
    return out;
}

struct EPartition {
    PointSet periodic;
    PointSet zero;
    PointSet one;
    PointSet mixed;
};

// Split of the downset of p0 at step k: periodic points, then non-periodic
// points whose non-periodic predecessors all carry 0, all carry 1, or both.
inline EPartition partitionE(const IterationTrace& t, std::size_t k, Point p0) {
    const auto& P = t.poset();
    if (p0 >= P.size()) throw InputError("unknown point " + std::to_string(p0));
    PointSet per = periodicPoints(t, k);
    const PointSet& u = t.at(k);
    EPartition e{PointSet(P.size()), PointSet(P.size()), PointSet(P.size()), PointSet(P.size())};
    P.down(p0).forEach([&](Point q) {
        if (per.test(q)) {
            e.periodic.set(q);
            return;
        }
        PointSet np = P.down(q) - per;
        bool anyOne = np.intersects(u);
        bool anyZero = !np.isSubsetOf(u);
        if (anyOne && anyZero) {
            e.mixed.set(q);
        } else if (anyOne) {
            e.one.set(q);
        } else {
            e.zero.set(q);
        }
    });
    return e;
}

struct PointType {
    bisim::ClassId before = 0;
    bisim::ClassId after = 0;
    friend auto operator<=>(const PointType&, const PointType&) = default;
};

// Types and ranks at bisimulation depth n - 1 over all distinct steps of one
// trace. Class handles are only comparable within one analysis.
class TypeAnalysis {
public:
    TypeAnalysis(const IterationTrace& t, std::size_t n) : t_(&t), n_(n), refinement_(family(t)) {
        if (n == 0) throw InputError("types need n >= 1");
    }

    std::size_t depth() const noexcept { return n_; }

    PointType pointType(std::size_t k, Point p) {
        if (!t_->periodicAt(p, k)) {
            throw InputError("point " + std::to_string(t_->poset().id(p)) + " is not periodic at step " +
                             std::to_string(k));
        }
        return {refinement_.classOf(t_->reduce(k), p, n_ - 1), refinement_.classOf(t_->reduce(k + 1), p, n_ - 1)};
    }

    // Distinct types of the periodic points below p.
    std::size_t rank(std::size_t k, Point p) {
        std::vector<PointType> seen;
        t_->poset().down(p).forEach([&](Point q) {
            if (t_->periodicAt(q, k)) seen.push_back(pointType(k, q));
        });
        std::sort(seen.begin(), seen.end());
        return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
    }

private:
    static std::vector<Evaluation> family(const IterationTrace& t) {
        std::vector<Evaluation> out;
        for (std::size_t k = 0; k < t.steps().size(); ++k) out.push_back(t.fusedAt(k));
        return out;
    }

    const IterationTrace* t_;
    std::size_t n_;
    bisim::Refinement refinement_;
};

inline PointType pointType(const IterationTrace& t, Point p, std::size_t n, std::size_t k) {
    return TypeAnalysis(t, n).pointType(k, p);
}

inline std::size_t rank(const IterationTrace& t, Point p, std::size_t n, std::size_t k) {
    return TypeAnalysis(t, n).rank(k, p);
}

struct IndexPeriod {
    std::size_t index = 0;
    std::size_t period = 1;
    friend bool operator==(const IndexPeriod&, const IndexPeriod&) = default;
};

// (max of indexes, lcm of periods)
inline IndexPeriod combineIndexPeriod(std::span<const IndexPeriod> parts) {
    if (parts.empty()) throw InputError("combineIndexPeriod: empty list");
    IndexPeriod out{0, 1};
    for (const auto& c : parts) {
        if (c.period == 0) throw InputError("combineIndexPeriod: period must be positive");
        out.index = std::max(out.index, c.index);
        out.period = std::lcm(out.period, c.period);
    }
    return out;
}

inline std::size_t bIndex(const Formula& a) { return std::max<std::size_t>(1, syntax::degree(a)); }

using ModelPair = std::pair<PairedEvaluation, PairedEvaluation>;

// Whenever the fused models are ~(n+k)-equivalent, the psi-images are ~k-equivalent.
inline bool shiftHolds(const Formula& a, const VariableName& x, std::size_t n, std::size_t k,
                       std::span<const ModelPair> pairs) {
    for (const auto& [m1, m2] : pairs) {
        auto f1 = fuse(m1, x);
        auto f2 = fuse(m2, x);
        if (!(f1.labels() == f2.labels())) throw InputError("bIndexHolds: label posets differ");
        if (!bisim::equivalent(f1, f2, n + k)) continue;
        auto g1 = fuse(m1.withU(onesOf(chiStep(a, x, m1))), x);
        auto g2 = fuse(m2.withU(onesOf(chiStep(a, x, m2))), x);
        if (!bisim::equivalent(g1, g2, k)) return false;
    }
    return true;
}

// Whenever the fused models are ~n-equivalent, chi agrees at the roots.
inline bool bIndexHolds(const Formula& a, const VariableName& x, std::size_t n, std::span<const ModelPair> pairs) {
    for (const auto& [m1, m2] : pairs) {
        auto f1 = fuse(m1, x);
        auto f2 = fuse(m2, x);
        if (!(f1.labels() == f2.labels())) throw InputError("bIndexHolds: label posets differ");
        if (!bisim::equivalent(f1, f2, n)) continue;
        auto r1 = chiStep(a, x, m1).rootLabel();
        auto r2 = chiStep(a, x, m2).rootLabel();
        if (r1 != r2) return false;
    }
    return true;
}

}  // namespace ruitenburg::dynamics
