#pragma once

// Decision procedures for IPC and CPC.
//
// proveIPC runs a terminating contraction-free sequent search (Dyckhoff's
// G4ip rules, invertible rules first). A failed search is turned into a
// Kripke countermodel: at an irreducible sequent every non-invertible
// alternative failed, and the countermodels of those alternatives are hung
// below a fresh root carrying the atoms of the antecedent. Sequents that are
// already classically refutable are closed at once by a one-point model.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ruitenburg/bisim.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"
#include "ruitenburg/kripke.hpp"

namespace ruitenburg::prover {

using syntax::Formula;
using syntax::Kind;

struct ProverConfig {
    std::size_t maxSteps = 4'000'000;  // sequents visited
    bool minimize = true;              // bisimulation-contract countermodels
    const Deadline* deadline = nullptr;
};

enum class Verdict { Provable, Refuted };

struct ProofOutcome {
    Verdict verdict;
    std::optional<kripke::Model> countermodel;  // present iff Refuted

    bool provable() const noexcept { return verdict == Verdict::Provable; }
};

namespace detail {

// Countermodel world; children are the points strictly below it.
struct World {
    std::uint64_t atoms;
    std::vector<std::shared_ptr<const World>> children;
};
using WorldPtr = std::shared_ptr<const World>;

inline constexpr std::size_t kMaxAtoms = 64;
inline constexpr std::size_t kTableAtoms = 12;  // classical pruning up to 2^12 assignments

// Hash-consed formula table local to one query.
class Table {
public:
    struct Node {
        Kind kind;
        std::uint32_t a;
        std::uint32_t b;
    };

    explicit Table(std::vector<std::string> atomNames) : atomNames_(std::move(atomNames)) {
        if (atomNames_.size() > kMaxAtoms) throw CapExceeded("prover supports at most 64 atoms");
        withTables_ = atomNames_.size() <= kTableAtoms;
        std::size_t assignments = std::size_t{1} << std::min(atomNames_.size(), kTableAtoms);
        words_ = (assignments + 63) / 64;
        lastMask_ = assignments % 64 == 0 ? ~0ULL : ((1ULL << assignments) - 1);
        bottom_ = intern(Kind::Bottom, 0, 0);
        for (std::uint32_t i = 0; i < atomNames_.size(); ++i) atomNodes_.push_back(intern(Kind::Atom, i, 0));
    }

    std::uint32_t intern(Kind kind, std::uint32_t a, std::uint32_t b) {
        std::uint64_t key = (static_cast<std::uint64_t>(kind) << 60) ^ (static_cast<std::uint64_t>(a) << 30) ^ b;
        auto [it, fresh] = index_.emplace(key, static_cast<std::uint32_t>(nodes_.size()));
        if (!fresh) return it->second;
        nodes_.push_back({kind, a, b});
        if (withTables_) appendTable(kind, a, b);
        return it->second;
    }

    std::uint32_t impl(std::uint32_t a, std::uint32_t b) { return intern(Kind::Impl, a, b); }

    std::uint32_t fromFormula(const Formula& f) {
        std::unordered_map<const syntax::detail::Node*, std::uint32_t> memo;
        std::vector<std::pair<Formula, bool>> stack{{f, false}};
        while (!stack.empty()) {
            auto [g, expanded] = stack.back();
            stack.pop_back();
            if (memo.count(g.id()) != 0) continue;
            if (g.isBinary() && !expanded) {
                stack.emplace_back(g, true);
                stack.emplace_back(g.right(), false);
                stack.emplace_back(g.left(), false);
                continue;
            }
            std::uint32_t id;
            if (g.isAtom()) {
                auto it = std::find(atomNames_.begin(), atomNames_.end(), g.atomText());
                id = atomNodes_[static_cast<std::size_t>(it - atomNames_.begin())];
            } else if (g.isBottom()) {
                id = bottom_;
            } else {
                id = intern(g.kind(), memo.at(g.left().id()), memo.at(g.right().id()));
            }
            memo.emplace(g.id(), id);
        }
        return memo.at(f.id());
    }

    Node node(std::uint32_t id) const { return nodes_[id]; }
    std::uint32_t atomNode(std::size_t i) const { return atomNodes_[i]; }
    const std::vector<std::string>& atomNames() const noexcept { return atomNames_; }

    bool hasTables() const noexcept { return withTables_; }

    // An assignment (bitmask over atoms) satisfying all of gamma and falsifying goal.
    std::optional<std::uint64_t> classicalRefutation(const std::vector<std::uint32_t>& gamma,
                                                     std::uint32_t goal) const {
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t acc = (w + 1 == words_) ? lastMask_ : ~0ULL;
            acc &= ~tables_[goal * words_ + w];
            for (auto f : gamma) {
                if (acc == 0) break;
                acc &= tables_[f * words_ + w];
            }
            if (acc != 0) return w * 64 + static_cast<std::uint64_t>(std::countr_zero(acc));
        }
        return std::nullopt;
    }

private:
    void appendTable(Kind kind, std::uint32_t a, std::uint32_t b) {
        std::size_t base = tables_.size();
        tables_.resize(base + words_);
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t v = 0;
            switch (kind) {
                case Kind::Bottom: v = 0; break;
                case Kind::Atom:
                    if (a < 6) {
                        static constexpr std::uint64_t pattern[6] = {
                            0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                            0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
                        v = pattern[a];
                    } else {
                        v = ((w >> (a - 6)) & 1ULL) ? ~0ULL : 0ULL;
                    }
                    break;
                case Kind::Conj: v = tables_[a * words_ + w] & tables_[b * words_ + w]; break;
                case Kind::Disj: v = tables_[a * words_ + w] | tables_[b * words_ + w]; break;
                case Kind::Impl: v = ~tables_[a * words_ + w] | tables_[b * words_ + w]; break;
            }
            if (w + 1 == words_) v &= lastMask_;
            tables_[base + w] = v;
        }
    }

    std::vector<std::string> atomNames_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::vector<std::uint32_t> atomNodes_;
    std::uint32_t bottom_ = 0;
    bool withTables_ = false;
    std::size_t words_ = 1;
    std::uint64_t lastMask_ = ~0ULL;
    std::vector<std::uint64_t> tables_;
};

struct VectorHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::uint64_t h = v.size();
        for (auto x : v) h = syntax::detail::mix(h ^ x);
        return static_cast<std::size_t>(h);
    }
};

class Search {
public:
    Search(Table& table, const ProverConfig& config) : t_(table), config_(config) {}

    // nullptr when gamma => goal is provable.
    WorldPtr prove(std::vector<std::uint32_t> gamma, std::uint32_t goal) {
        if (++steps_ > config_.maxSteps) {
            throw ResourceLimit("IPC proof search exceeded " + std::to_string(config_.maxSteps) + " sequents");
        }
        if (config_.deadline != nullptr && (steps_ & 1023) == 1) config_.deadline->check("IPC proof search");
        std::sort(gamma.begin(), gamma.end());
        gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
        std::vector<std::uint32_t> key = gamma;
        key.push_back(goal);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        WorldPtr result = search(std::move(gamma), goal);
        memo_.emplace(std::move(key), result);
        return result;
    }

    std::size_t steps() const noexcept { return steps_; }

private:
    struct Context {
        bool closed = false;  // bottom in the antecedent
        std::uint64_t atoms = 0;
        std::vector<std::uint32_t> formulas;  // everything kept, atoms included
        std::vector<std::uint32_t> disjunctions;
        std::vector<std::uint32_t> nested;  // (c -> d) -> b
    };

    // Exhaustive application of the invertible left rules.
    Context saturate(const std::vector<std::uint32_t>& gamma) {
        Context ctx;
        std::vector<std::uint32_t> todo(gamma.rbegin(), gamma.rend());
        std::vector<std::uint32_t> seen;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> waiting;  // (atom index, p -> B)
        auto seenBefore = [&](std::uint32_t f) {
            if (std::find(seen.begin(), seen.end(), f) != seen.end()) return true;
            seen.push_back(f);
            return false;
        };
        while (!todo.empty()) {
            std::uint32_t f = todo.back();
            todo.pop_back();
            if (seenBefore(f)) continue;
            const auto n = t_.node(f);
            switch (n.kind) {
                case Kind::Bottom: ctx.closed = true; return ctx;
                case Kind::Atom:
                    ctx.atoms |= 1ULL << n.a;
                    for (auto& [atom, g] : waiting) {
                        if (atom == n.a && g != UINT32_MAX) {
                            todo.push_back(t_.node(g).b);
                            g = UINT32_MAX;
                        }
                    }
                    break;
                case Kind::Conj:
                    todo.push_back(n.b);
                    todo.push_back(n.a);
                    break;
                case Kind::Disj: ctx.disjunctions.push_back(f); break;
                case Kind::Impl: {
                    const auto lhs = t_.node(n.a);
                    switch (lhs.kind) {
                        case Kind::Atom:
                            if ((ctx.atoms >> lhs.a) & 1ULL) {
                                todo.push_back(n.b);
                            } else {
                                waiting.emplace_back(lhs.a, f);
                            }
                            break;
                        case Kind::Bottom: break;
                        case Kind::Conj: todo.push_back(t_.impl(lhs.a, t_.impl(lhs.b, n.b))); break;
                        case Kind::Disj:
                            todo.push_back(t_.impl(lhs.b, n.b));
                            todo.push_back(t_.impl(lhs.a, n.b));
                            break;
                        case Kind::Impl: ctx.nested.push_back(f); break;
                    }
                    break;
                }
            }
        }
        for (std::size_t i = 0; i < t_.atomNames().size(); ++i) {
            if ((ctx.atoms >> i) & 1ULL) ctx.formulas.push_back(t_.atomNode(i));
        }
        for (auto [atom, g] : waiting) {
            if (g != UINT32_MAX) ctx.formulas.push_back(g);
        }
        ctx.formulas.insert(ctx.formulas.end(), ctx.disjunctions.begin(), ctx.disjunctions.end());
        ctx.formulas.insert(ctx.formulas.end(), ctx.nested.begin(), ctx.nested.end());
        return ctx;
    }

    static std::vector<std::uint32_t> without(const std::vector<std::uint32_t>& v, std::uint32_t f) {
        std::vector<std::uint32_t> out;
        out.reserve(v.size() + 2);
        for (auto g : v) {
            if (g != f) out.push_back(g);
        }
        return out;
    }

    WorldPtr search(std::vector<std::uint32_t> gamma, std::uint32_t goal) {
        // Right implication is invertible.
        while (t_.node(goal).kind == Kind::Impl) {
            gamma.push_back(t_.node(goal).a);
            goal = t_.node(goal).b;
        }
        Context ctx = saturate(gamma);
        if (ctx.closed) return nullptr;
        const auto g = t_.node(goal);
        if (g.kind == Kind::Atom && ((ctx.atoms >> g.a) & 1ULL)) return nullptr;
        if (std::find(ctx.formulas.begin(), ctx.formulas.end(), goal) != ctx.formulas.end()) return nullptr;

        if (t_.hasTables()) {
            if (auto assignment = t_.classicalRefutation(ctx.formulas, goal)) {
                return std::make_shared<const World>(World{*assignment, {}});
            }
        }

        if (g.kind == Kind::Conj) {
            if (auto w = prove(ctx.formulas, g.a)) return w;
            return prove(ctx.formulas, g.b);
        }

        if (!ctx.disjunctions.empty()) {
            std::uint32_t d = ctx.disjunctions.front();
            auto rest = without(ctx.formulas, d);
            auto left = rest;
            left.push_back(t_.node(d).a);
            if (auto w = prove(std::move(left), goal)) return w;
            rest.push_back(t_.node(d).b);
            return prove(std::move(rest), goal);
        }

        // Irreducible: only non-invertible rules remain.
        std::vector<WorldPtr> children;
        if (g.kind == Kind::Disj) {
            auto w1 = prove(ctx.formulas, g.a);
            if (!w1) return nullptr;
            auto w2 = prove(ctx.formulas, g.b);
            if (!w2) return nullptr;
            children.push_back(std::move(w1));
            children.push_back(std::move(w2));
        }
        for (std::uint32_t f : ctx.nested) {
            const auto n = t_.node(f);
            const auto lhs = t_.node(n.a);  // c -> d
            auto rest = without(ctx.formulas, f);
            auto premise = rest;
            premise.push_back(t_.impl(lhs.b, n.b));
            premise.push_back(lhs.a);
            auto w = prove(std::move(premise), lhs.b);
            if (!w) {
                rest.push_back(n.b);
                return prove(std::move(rest), goal);
            }
            children.push_back(std::move(w));
        }
        return std::make_shared<const World>(World{ctx.atoms, std::move(children)});
    }

    Table& t_;
    const ProverConfig& config_;
    std::size_t steps_ = 0;
    std::unordered_map<std::vector<std::uint32_t>, WorldPtr, VectorHash> memo_;
};

inline std::vector<std::string> atomList(const Formula& a) {
    std::vector<std::string> out;
    for (const auto& v : syntax::atoms(a)) out.push_back(v.str());
    return out;
}

inline kripke::Model worldsToModel(const WorldPtr& root, const std::vector<std::string>& atoms) {
    std::vector<const World*> order;
    std::unordered_map<const World*, std::size_t> index;
    index.emplace(root.get(), 0);
    order.push_back(root.get());
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& c : order[i]->children) {
            if (index.emplace(c.get(), order.size()).second) order.push_back(c.get());
        }
    }
    const std::size_t n = order.size();
    std::vector<kripke::PointSet> down(n, kripke::PointSet(n));
    std::vector<kripke::Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        down[i].set(i);
        labels[i] = order[i]->atoms;
        for (const auto& c : order[i]->children) down[i].set(index.at(c.get()));
    }
    return kripke::makeModel(kripke::Poset::fromDownsets(std::move(down)), atoms, std::move(labels));
}

// Quotient by the unbounded bisimulation; forcing is preserved.
inline kripke::Model contract(const kripke::Model& m) {
    bisim::Refinement r({m});
    const auto depth = bisim::BisimDepth::infinite();
    std::map<bisim::ClassId, std::size_t> cls;
    std::vector<std::size_t> of(m.size());
    for (kripke::Point p = 0; p < m.size(); ++p) {
        of[p] = cls.emplace(r.classOf(0, p, depth), cls.size()).first->second;
    }
    const std::size_t k = cls.size();
    if (k == m.size()) return m;
    std::vector<kripke::PointSet> down(k, kripke::PointSet(k));
    std::vector<kripke::Label> labels(k);
    for (kripke::Point q = 0; q < m.size(); ++q) {
        labels[of[q]] = m.at(q);
        m.poset().down(q).forEach([&](kripke::Point p) { down[of[q]].set(of[p]); });
    }
    // Relabel so that the root's class is point 0.
    std::size_t rootClass = of[m.poset().root()];
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::swap(perm[0], perm[rootClass]);
    std::vector<kripke::PointSet> down2(k, kripke::PointSet(k));
    std::vector<kripke::Label> labels2(k);
    for (std::size_t i = 0; i < k; ++i) {
        labels2[i] = labels[perm[i]];
        for (std::size_t j = 0; j < k; ++j) {
            if (down[perm[i]].test(perm[j])) down2[i].set(j);
        }
    }
    return kripke::Model(kripke::Poset::fromDownsets(std::move(down2)), m.labelsPtr(), std::move(labels2));
}

// Submodel on the given points, renumbered in the given order.
inline kripke::Model induced(const kripke::Model& m, const std::vector<kripke::Point>& keep) {
    const std::size_t k = keep.size();
    std::vector<kripke::PointSet> down(k, kripke::PointSet(k));
    std::vector<kripke::Label> labels(k);
    for (std::size_t i = 0; i < k; ++i) {
        labels[i] = m.at(keep[i]);
        for (std::size_t j = 0; j < k; ++j) {
            if (m.poset().leq(keep[j], keep[i])) down[i].set(j);
        }
    }
    return kripke::Model(kripke::Poset::fromDownsets(std::move(down), {}, false), m.labelsPtr(),
                         std::move(labels));
}

// Drops points one at a time, latest first, while the root still refutes a.
inline kripke::Model prune(kripke::Model m, const Formula& a) {
    if (m.size() > 64) return m;
    for (kripke::Point p = m.size(); p-- > 0;) {
        if (p == m.poset().root()) continue;
        std::vector<kripke::Point> keep;
        for (kripke::Point q = 0; q < m.size(); ++q) {
            if (q != p) keep.push_back(q);
        }
        auto trial = induced(m, keep);
        if (!kripke::forces(trial, a)) m = std::move(trial);
    }
    return m;
}

}  // namespace detail

// Decide a in IPC; a refutation carries a countermodel whose root does not force a.
inline ProofOutcome proveIPC(const Formula& a, const ProverConfig& config = {}) {
    auto atoms = detail::atomList(a);
    detail::Table table(atoms);
    auto goal = table.fromFormula(a);
    detail::Search search(table, config);
    auto world = search.prove({}, goal);
    if (!world) return {Verdict::Provable, std::nullopt};
    kripke::Model model = detail::worldsToModel(world, atoms);
    if (kripke::forces(model, a)) {
        throw ContractViolation("IPC prover produced a model that does not refute " + syntax::render(a));
    }
    if (config.minimize) {
        kripke::Model small = detail::contract(detail::prune(detail::contract(model), a));
        if (!kripke::forces(small, a)) return {Verdict::Refuted, std::move(small)};
    }
    return {Verdict::Refuted, std::move(model)};
}

// Verdict only; skips countermodel assembly checks.
inline bool isTheoremIPC(const Formula& a, const ProverConfig& config = {}) {
    auto atoms = detail::atomList(a);
    detail::Table table(atoms);
    auto goal = table.fromFormula(a);
    detail::Search search(table, config);
    return search.prove({}, goal) == nullptr;
}

inline bool equivIPC(const Formula& a, const Formula& b, const ProverConfig& config = {}) {
    return isTheoremIPC(Formula::iff(a, b), config);
}

inline constexpr std::size_t kDefaultClassicalAtoms = 20;

// Truth-table check, 64 assignments per word.
inline bool proveCPC(const Formula& a, std::size_t maxAtoms = kDefaultClassicalAtoms) {
    auto atoms = detail::atomList(a);
    if (atoms.size() > maxAtoms) {
        throw CapExceeded("classical check limited to " + std::to_string(maxAtoms) + " atoms");
    }
    kripke::CompiledFormula cf(a, atoms);
    const std::size_t k = atoms.size();
    const std::uint64_t total = std::uint64_t{1} << k;
    const std::uint64_t blocks = (total + 63) / 64;
    const std::uint64_t lastMask = total % 64 == 0 ? ~0ULL : ((1ULL << total) - 1);
    static constexpr std::uint64_t pattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                                 0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    std::vector<std::uint64_t> v(cf.ops().size());
    for (std::uint64_t w = 0; w < blocks; ++w) {
        for (std::size_t i = 0; i < cf.ops().size(); ++i) {
            const auto& op = cf.ops()[i];
            switch (op.kind) {
                case Kind::Atom: v[i] = op.a < 6 ? pattern[op.a] : (((w >> (op.a - 6)) & 1ULL) ? ~0ULL : 0ULL); break;
                case Kind::Bottom: v[i] = 0; break;
                case Kind::Conj: v[i] = v[op.a] & v[op.b]; break;
                case Kind::Disj: v[i] = v[op.a] | v[op.b]; break;
                case Kind::Impl: v[i] = ~v[op.a] | v[op.b]; break;
            }
        }
        std::uint64_t mask = (w + 1 == blocks) ? lastMask : ~0ULL;
        if ((~v.back() & mask) != 0) return false;
    }
    return true;
}

// Exhaustive search over rooted posets of 1..maxNodes points (up to
// isomorphism) and all monotone valuations of the atoms of a. Returns the
// first refuting model in enumeration order. Test oracle.
inline std::optional<kripke::Model> countermodelSearch(const Formula& a, std::size_t maxNodes) {
    if (maxNodes == 0) throw InputError("countermodelSearch: maxNodes must be at least 1");
    auto atoms = detail::atomList(a);
    kripke::CompiledFormula cf(a, atoms);
    kripke::ForcingEvaluator ev;
    for (std::size_t n = 1; n <= maxNodes; ++n) {
        for (const auto& P : kripke::enumerateRootedPosetsExactly(n)) {
            auto ds = kripke::downsets(P);
            std::vector<std::size_t> choice(atoms.size(), 0);
            std::vector<std::uint64_t> masks(atoms.size(), 0);
            const std::uint64_t rootBit = 1ULL << P.root();
            while (true) {
                for (std::size_t i = 0; i < atoms.size(); ++i) masks[i] = ds[choice[i]].words()[0];
                if ((ev.evaluateSmall(cf, P, masks) & rootBit) == 0) {
                    std::vector<kripke::Label> labels(P.size(), 0);
                    for (std::size_t i = 0; i < atoms.size(); ++i) {
                        for (kripke::Point p = 0; p < P.size(); ++p) {
                            if ((masks[i] >> p) & 1ULL) labels[p] |= 1ULL << i;
                        }
                    }
                    return kripke::makeModel(P, atoms, std::move(labels));
                }
                std::size_t i = 0;
                while (i < choice.size() && ++choice[i] == ds.size()) choice[i++] = 0;
                if (i == choice.size()) break;
            }
        }
    }
    return std::nullopt;
}

}  // namespace ruitenburg::prover
