#pragma once

// Finite rooted posets, L-evaluations and forcing.
//
// Orientation: the root is the GREATEST element and persistence goes
// downwards, so p <= q implies u(p) >= u(q) in L. For Kripke models L is the
// powerset of an atom list ordered by reverse inclusion, and p <= q implies
// that p carries every atom q carries.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"

namespace ruitenburg::kripke {

using Point = std::size_t;
using PointId = long long;
using Label = std::uint64_t;

// Fixed-universe bitset over the points of one poset.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t universe) : size_(universe), words_((universe + 63) / 64, 0) {}

    static PointSet full(std::size_t universe) {
        PointSet s(universe);
        for (auto& w : s.words_) w = ~0ULL;
        s.trim();
        return s;
    }

    std::size_t universe() const noexcept { return size_; }
    bool test(Point p) const { return (words_[p / 64] >> (p % 64)) & 1ULL; }
    void set(Point p, bool value = true) {
        if (value) {
            words_[p / 64] |= 1ULL << (p % 64);
        } else {
            words_[p / 64] &= ~(1ULL << (p % 64));
        }
    }
    void reset(Point p) { set(p, false); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const {
        return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
    }
    bool any() const { return !none(); }

    PointSet& operator|=(const PointSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    PointSet& operator&=(const PointSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    // Set difference.
    PointSet& operator-=(const PointSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }
    friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
    friend PointSet operator-(PointSet a, const PointSet& b) { return a -= b; }

    PointSet complement() const {
        PointSet s = *this;
        for (auto& w : s.words_) w = ~w;
        s.trim();
        return s;
    }

    bool isSubsetOf(const PointSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & ~o.words_[i]) != 0) return false;
        }
        return true;
    }
    bool intersects(const PointSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if ((words_[i] & o.words_[i]) != 0) return true;
        }
        return false;
    }

    template <class F>
    void forEach(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            auto w = words_[i];
            while (w != 0) {
                auto bit = static_cast<std::size_t>(std::countr_zero(w));
                f(i * 64 + bit);
                w &= w - 1;
            }
        }
    }

    std::vector<Point> elements() const {
        std::vector<Point> out;
        forEach([&](Point p) { out.push_back(p); });
        return out;
    }

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }
    std::vector<std::uint64_t>& words() noexcept { return words_; }

    friend bool operator==(const PointSet&, const PointSet&) = default;
    friend auto operator<=>(const PointSet&, const PointSet&) = default;

    void trim() {
        if (size_ % 64 != 0 && !words_.empty()) words_.back() &= (1ULL << (size_ % 64)) - 1;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

// Finite rooted partial order. Points are indices 0..n-1; each carries a stable
// external id. The order is stored reflexively and transitively closed.
class Poset {
public:
    // leq pairs (a, b) mean a <= b, given in external ids. The relation is
    // closed, then checked for antisymmetry and for a greatest element.
    static Poset fromRelation(std::vector<PointId> ids, const std::vector<std::pair<PointId, PointId>>& leq) {
        std::map<PointId, Point> index;
        for (Point i = 0; i < ids.size(); ++i) {
            if (!index.emplace(ids[i], i).second) {
                throw ValidationError("duplicate point id " + std::to_string(ids[i]));
            }
        }
        if (ids.empty()) throw ValidationError("poset has no points");
        std::vector<PointSet> down(ids.size(), PointSet(ids.size()));
        for (Point i = 0; i < ids.size(); ++i) down[i].set(i);
        for (auto [a, b] : leq) {
            auto ia = index.find(a);
            auto ib = index.find(b);
            if (ia == index.end() || ib == index.end()) {
                throw ValidationError("leq pair [" + std::to_string(a) + "," + std::to_string(b) +
                                      "] names an unknown point");
            }
            down[ib->second].set(ia->second);
        }
        return fromDownsets(std::move(down), std::move(ids), true);
    }

    // down[p] must contain p; closes transitively when `close` is set.
    static Poset fromDownsets(std::vector<PointSet> down, std::vector<PointId> ids = {}, bool close = true) {
        const std::size_t n = down.size();
        if (n == 0) throw ValidationError("poset has no points");
        if (ids.empty()) {
            ids.resize(n);
            std::iota(ids.begin(), ids.end(), PointId{0});
        }
        if (close) {
            // Warshall on rows: if k <= i then down(k) <= down(i).
            for (Point k = 0; k < n; ++k) {
                for (Point i = 0; i < n; ++i) {
                    if (i != k && down[i].test(k)) down[i] |= down[k];
                }
            }
        }
        Poset p;
        p.ids_ = std::move(ids);
        p.down_ = std::move(down);
        p.up_.assign(n, PointSet(n));
        for (Point i = 0; i < n; ++i) {
            if (!p.down_[i].test(i)) throw ValidationError("relation is not reflexive");
            p.down_[i].forEach([&](Point j) { p.up_[j].set(i); });
        }
        for (Point i = 0; i < n; ++i) {
            for (Point j = i + 1; j < n; ++j) {
                if (p.down_[i].test(j) && p.down_[j].test(i)) {
                    throw ValidationError("order has a cycle between points " + std::to_string(p.ids_[i]) +
                                          " and " + std::to_string(p.ids_[j]));
                }
            }
        }
        std::vector<Point> maximal;
        for (Point i = 0; i < n; ++i) {
            if (p.up_[i].count() == 1) maximal.push_back(i);
        }
        if (maximal.size() != 1) {
            throw ValidationError("poset is not rooted: points " + std::to_string(p.ids_[maximal[0]]) + " and " +
                                  std::to_string(p.ids_[maximal[1]]) + " are both maximal");
        }
        p.root_ = maximal.front();
        if (n <= 64) {
            p.upMask_.resize(n);
            p.downMask_.resize(n);
            for (Point i = 0; i < n; ++i) {
                p.upMask_[i] = p.up_[i].words()[0];
                p.downMask_[i] = p.down_[i].words()[0];
            }
        }
        return p;
    }

    // Root 0 above 1 above ... above n-1.
    static Poset chain(std::size_t n) {
        std::vector<PointSet> down(n, PointSet(n));
        for (Point i = 0; i < n; ++i) {
            for (Point j = i; j < n; ++j) down[i].set(j);
        }
        return fromDownsets(std::move(down), {}, false);
    }

    std::size_t size() const noexcept { return down_.size(); }
    Point root() const noexcept { return root_; }
    bool leq(Point a, Point b) const { return down_[b].test(a); }
    bool less(Point a, Point b) const { return a != b && leq(a, b); }

    // Points q <= p, p included.
    const PointSet& down(Point p) const { return down_[p]; }
    // Points q >= p, p included.
    const PointSet& up(Point p) const { return up_[p]; }
    PointSet strictlyBelow(Point p) const {
        PointSet s = down_[p];
        s.reset(p);
        return s;
    }

    // Only populated when size() <= 64.
    std::uint64_t upMask(Point p) const { return upMask_[p]; }
    std::uint64_t downMask(Point p) const { return downMask_[p]; }
    bool small() const noexcept { return size() <= 64; }

    const std::vector<PointId>& ids() const noexcept { return ids_; }
    PointId id(Point p) const { return ids_[p]; }
    std::optional<Point> indexOf(PointId id) const {
        auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) return std::nullopt;
        return static_cast<Point>(it - ids_.begin());
    }

    // Pairs (lower, upper) with nothing strictly between them.
    std::vector<std::pair<Point, Point>> covers() const {
        std::vector<std::pair<Point, Point>> out;
        for (Point b = 0; b < size(); ++b) {
            down_[b].forEach([&](Point a) {
                if (a == b) return;
                bool direct = true;
                down_[b].forEach([&](Point c) {
                    if (c != a && c != b && leq(a, c)) direct = false;
                });
                if (direct) out.emplace_back(a, b);
            });
        }
        return out;
    }

    // Points ordered so that every point comes after all points below it.
    std::vector<Point> bottomUp() const {
        std::vector<Point> order(size());
        std::iota(order.begin(), order.end(), Point{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](Point a, Point b) { return down_[a].count() < down_[b].count(); });
        return order;
    }

    friend bool operator==(const Poset& a, const Poset& b) { return a.ids_ == b.ids_ && a.down_ == b.down_; }

private:
    Poset() = default;

    std::vector<PointId> ids_;
    std::vector<PointSet> down_;
    std::vector<PointSet> up_;
    std::vector<std::uint64_t> upMask_;
    std::vector<std::uint64_t> downMask_;
    Point root_ = 0;
};

// Maximum cardinality of a chain.
inline std::size_t height(const Poset& p) {
    std::vector<std::size_t> h(p.size(), 1);
    std::size_t best = 0;
    for (Point q : p.bottomUp()) {
        p.strictlyBelow(q).forEach([&](Point r) { h[q] = std::max(h[q], h[r] + 1); });
        best = std::max(best, h[q]);
    }
    return best;
}

// Finite poset of labels. Either an explicit order or the powerset of an
// atom list ordered by reverse inclusion (element = bitmask of atoms).
class LabelPoset {
public:
    static LabelPoset powerset(std::vector<std::string> atoms) {
        if (atoms.size() > 63) throw CapExceeded("at most 63 atoms are supported");
        std::set<std::string> distinct(atoms.begin(), atoms.end());
        if (distinct.size() != atoms.size()) throw ValidationError("duplicate atom in atom list");
        for (const auto& a : atoms) {
            if (!syntax::isIdentifier(a)) throw ValidationError("invalid atom name '" + a + "'");
        }
        LabelPoset l;
        l.atoms_ = std::move(atoms);
        l.powerset_ = true;
        return l;
    }

    // {0, 1} with 1 <= 0.
    static LabelPoset two() { return explicitOrder(2, {{1, 0}}); }

    // Elements 0..n-1; pairs (a, b) mean a <= b.
    static LabelPoset explicitOrder(std::size_t n, const std::vector<std::pair<Label, Label>>& leq) {
        std::vector<PointSet> down(n, PointSet(n));
        for (std::size_t i = 0; i < n; ++i) down[i].set(i);
        for (auto [a, b] : leq) {
            if (a >= n || b >= n) throw ValidationError("label order names an unknown label");
            down[b].set(a);
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                if (down[i].test(k)) down[i] |= down[k];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (down[i].test(j) && down[j].test(i)) throw ValidationError("label order has a cycle");
            }
        }
        LabelPoset l;
        l.down_ = std::move(down);
        return l;
    }

    bool isPowerset() const noexcept { return powerset_; }
    const std::vector<std::string>& atoms() const noexcept { return atoms_; }
    std::optional<std::size_t> atomIndex(const std::string& name) const {
        auto it = std::find(atoms_.begin(), atoms_.end(), name);
        if (it == atoms_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - atoms_.begin());
    }

    std::uint64_t size() const noexcept { return powerset_ ? (std::uint64_t{1} << atoms_.size()) : down_.size(); }
    bool contains(Label a) const noexcept { return a < size(); }

    bool leq(Label a, Label b) const {
        if (powerset_) return (a & b) == b;
        return down_[b].test(a);
    }

    // Maximum size of a chain.
    std::size_t height() const {
        if (powerset_) return atoms_.size() + 1;
        std::vector<std::size_t> h(down_.size(), 1);
        std::vector<std::size_t> order(down_.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](auto a, auto b) { return down_[a].count() < down_[b].count(); });
        std::size_t best = 0;
        for (auto q : order) {
            down_[q].forEach([&](std::size_t r) {
                if (r != q) h[q] = std::max(h[q], h[r] + 1);
            });
            best = std::max(best, h[q]);
        }
        return best;
    }

    std::string labelName(Label a) const {
        if (!powerset_) return std::to_string(a);
        std::string s = "{";
        bool first = true;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if ((a >> i) & 1ULL) {
                if (!first) s += ",";
                s += atoms_[i];
                first = false;
            }
        }
        return s + "}";
    }

    friend bool operator==(const LabelPoset& a, const LabelPoset& b) {
        return a.powerset_ == b.powerset_ && a.atoms_ == b.atoms_ && a.down_ == b.down_;
    }

private:
    LabelPoset() = default;

    bool powerset_ = false;
    std::vector<std::string> atoms_;
    std::vector<PointSet> down_;
};

// Order-preserving map from a rooted poset into a label poset.
class Evaluation {
public:
    Evaluation(Poset poset, std::shared_ptr<const LabelPoset> labels, std::vector<Label> values)
        : poset_(std::move(poset)), labels_(std::move(labels)), values_(std::move(values)) {
        if (values_.size() != poset_.size()) throw ValidationError("evaluation is not total on the poset");
        for (Point p = 0; p < poset_.size(); ++p) {
            if (!labels_->contains(values_[p])) {
                throw ValidationError("point " + std::to_string(poset_.id(p)) + " has an unknown label");
            }
        }
        for (Point q = 0; q < poset_.size(); ++q) {
            poset_.down(q).forEach([&](Point p) {
                if (!labels_->leq(values_[p], values_[q])) {
                    throw ValidationError("evaluation is not order-preserving: point " + std::to_string(poset_.id(p)) +
                                          " <= " + std::to_string(poset_.id(q)) + " but " +
                                          labels_->labelName(values_[p]) + " is not below " +
                                          labels_->labelName(values_[q]));
                }
            });
        }
    }

    const Poset& poset() const noexcept { return poset_; }
    const LabelPoset& labels() const noexcept { return *labels_; }
    const std::shared_ptr<const LabelPoset>& labelsPtr() const noexcept { return labels_; }
    Label at(Point p) const { return values_[p]; }
    Label rootLabel() const { return values_[poset_.root()]; }
    const std::vector<Label>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return poset_.size(); }

    friend bool operator==(const Evaluation& a, const Evaluation& b) {
        return a.poset_ == b.poset_ && *a.labels_ == *b.labels_ && a.values_ == b.values_;
    }

private:
    Poset poset_;
    std::shared_ptr<const LabelPoset> labels_;
    std::vector<Label> values_;
};

// A Kripke model is an evaluation into a powerset label poset.
using Model = Evaluation;

inline Model makeModel(Poset poset, std::vector<std::string> atoms, std::vector<Label> masks) {
    return Model(std::move(poset), std::make_shared<const LabelPoset>(LabelPoset::powerset(std::move(atoms))),
                 std::move(masks));
}

// Points whose label contains the given atom.
inline PointSet atomExtension(const Model& m, std::size_t atom) {
    PointSet s(m.size());
    for (Point p = 0; p < m.size(); ++p) {
        if ((m.at(p) >> atom) & 1ULL) s.set(p);
    }
    return s;
}

// Restriction to the downset of p; p becomes the root, ids are kept.
inline Evaluation restrict(const Evaluation& u, Point p) {
    if (p >= u.size()) throw InputError("restrict: unknown point " + std::to_string(p));
    const auto& P = u.poset();
    std::vector<Point> keep = P.down(p).elements();
    std::vector<PointSet> down(keep.size(), PointSet(keep.size()));
    std::vector<PointId> ids;
    std::vector<Label> values;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        ids.push_back(P.id(keep[i]));
        values.push_back(u.at(keep[i]));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            if (P.leq(keep[j], keep[i])) down[i].set(j);
        }
    }
    return Evaluation(Poset::fromDownsets(std::move(down), std::move(ids), false), u.labelsPtr(),
                      std::move(values));
}

// --- forcing ----------------------------------------------------------------

// Formula flattened into topologically ordered operations, with atoms
// resolved against a model's atom list.
class CompiledFormula {
public:
    struct Op {
        syntax::Kind kind;
        std::uint32_t a = 0;  // atom index, or left operand
        std::uint32_t b = 0;  // right operand
    };

    CompiledFormula(const syntax::Formula& f, const std::vector<std::string>& atoms) {
        std::unordered_map<const syntax::detail::Node*, std::uint32_t> index;
        // Iterative post-order over the dag.
        std::vector<std::pair<syntax::Formula, bool>> stack{{f, false}};
        while (!stack.empty()) {
            auto [g, expanded] = stack.back();
            stack.pop_back();
            if (index.count(g.id()) != 0) continue;
            if (g.isBinary() && !expanded) {
                stack.emplace_back(g, true);
                stack.emplace_back(g.right(), false);
                stack.emplace_back(g.left(), false);
                continue;
            }
            Op op{g.kind()};
            if (g.isAtom()) {
                auto it = std::find(atoms.begin(), atoms.end(), g.atomText());
                if (it == atoms.end()) throw AtomError("atom '" + g.atomText() + "' is not interpreted by the model");
                op.a = static_cast<std::uint32_t>(it - atoms.begin());
            } else if (g.isBinary()) {
                op.a = index.at(g.left().id());
                op.b = index.at(g.right().id());
            }
            index.emplace(g.id(), static_cast<std::uint32_t>(ops_.size()));
            ops_.push_back(op);
        }
    }

    const std::vector<Op>& ops() const noexcept { return ops_; }

private:
    std::vector<Op> ops_;
};

// Computes, for every point, whether it forces the formula. Holds scratch
// buffers so repeated evaluations do not allocate; not shareable across threads.
class ForcingEvaluator {
public:
    // atomExt[i] = points carrying atom i.
    PointSet evaluate(const CompiledFormula& f, const Poset& P, std::span<const PointSet> atomExt) {
        const auto& ops = f.ops();
        const std::size_t n = P.size();
        if (P.small()) {
            std::vector<std::uint64_t> masks(atomExt.size());
            for (std::size_t i = 0; i < atomExt.size(); ++i) masks[i] = atomExt[i].words()[0];
            PointSet out(n);
            out.words()[0] = evaluateSmall(f, P, masks);
            return out;
        }
        std::vector<PointSet> ext;
        ext.reserve(ops.size());
        for (const auto& op : ops) {
            switch (op.kind) {
                case syntax::Kind::Atom: ext.push_back(atomExt[op.a]); break;
                case syntax::Kind::Bottom: ext.emplace_back(n); break;
                case syntax::Kind::Conj: ext.push_back(ext[op.a] & ext[op.b]); break;
                case syntax::Kind::Disj: ext.push_back(ext[op.a] | ext[op.b]); break;
                case syntax::Kind::Impl: {
                    PointSet bad = ext[op.a] - ext[op.b];
                    PointSet spoiled(n);
                    bad.forEach([&](Point q) { spoiled |= P.up(q); });
                    ext.push_back(spoiled.complement());
                    break;
                }
            }
        }
        return ext.back();
    }

    // Same for posets of at most 64 points, with point sets as bit masks.
    std::uint64_t evaluateSmall(const CompiledFormula& f, const Poset& P, std::span<const std::uint64_t> atomMasks) {
        const auto& ops = f.ops();
        const std::size_t n = P.size();
        const std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
        small_.resize(ops.size());
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const auto& op = ops[i];
            switch (op.kind) {
                case syntax::Kind::Atom: small_[i] = atomMasks[op.a]; break;
                case syntax::Kind::Bottom: small_[i] = 0; break;
                case syntax::Kind::Conj: small_[i] = small_[op.a] & small_[op.b]; break;
                case syntax::Kind::Disj: small_[i] = small_[op.a] | small_[op.b]; break;
                case syntax::Kind::Impl: {
                    std::uint64_t bad = small_[op.a] & ~small_[op.b];
                    std::uint64_t spoiled = 0;
                    while (bad != 0) {
                        spoiled |= P.upMask(static_cast<Point>(std::countr_zero(bad)));
                        bad &= bad - 1;
                    }
                    small_[i] = all & ~spoiled;
                    break;
                }
            }
        }
        return small_.back();
    }

private:
    std::vector<std::uint64_t> small_;
};

inline std::vector<PointSet> atomExtensions(const Model& m) {
    std::vector<PointSet> out;
    for (std::size_t i = 0; i < m.labels().atoms().size(); ++i) out.push_back(atomExtension(m, i));
    return out;
}

inline void requireKripke(const Evaluation& m) {
    if (!m.labels().isPowerset()) throw InputError("forcing needs a Kripke model (powerset labels)");
}

// Set of points forcing a.
inline PointSet extension(const Model& m, const syntax::Formula& a) {
    requireKripke(m);
    CompiledFormula cf(a, m.labels().atoms());
    ForcingEvaluator ev;
    auto ext = atomExtensions(m);
    return ev.evaluate(cf, m.poset(), ext);
}

inline bool forcesAt(const Model& m, Point p, const syntax::Formula& a) { return extension(m, a).test(p); }

// Forcing at the root.
inline bool forces(const Model& m, const syntax::Formula& a) { return forcesAt(m, m.poset().root(), a); }

// --- open maps --------------------------------------------------------------

// f[q] is the image of q in P.
inline bool isOpenMap(std::span<const Point> f, const Poset& Q, const Poset& P) {
    if (f.size() != Q.size()) throw InputError("map is not total on its domain");
    for (auto image : f) {
        if (image >= P.size()) throw InputError("map sends a point outside the codomain");
    }
    for (Point q = 0; q < Q.size(); ++q) {
        PointSet image(P.size());
        bool monotone = true;
        Q.down(q).forEach([&](Point r) {
            if (!P.leq(f[r], f[q])) monotone = false;
            image.set(f[r]);
        });
        if (!monotone) return false;
        if (!P.down(f[q]).isSubsetOf(image)) return false;
    }
    return true;
}

// v o f, for an open map f: Q -> P.
inline Evaluation composeEvaluation(const Evaluation& v, std::span<const Point> f, const Poset& Q) {
    if (!isOpenMap(f, Q, v.poset())) throw InputError("composeEvaluation: the map is not open");
    std::vector<Label> values(Q.size());
    for (Point q = 0; q < Q.size(); ++q) values[q] = v.at(f[q]);
    return Evaluation(Q, v.labelsPtr(), std::move(values));
}

// --- enumeration ------------------------------------------------------------

inline constexpr std::size_t kDefaultPosetCap = 7;

namespace detail {

// Canonical code of a rooted poset whose root is point 0: the lexicographically
// smallest relation matrix over all relabelings fixing the root.
inline std::uint64_t canonicalCode(const std::vector<std::uint64_t>& down) {
    const std::size_t n = down.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::uint64_t best = ~0ULL;
    do {
        std::uint64_t code = 0;
        std::size_t bit = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j, ++bit) {
                if ((down[perm[i]] >> perm[j]) & 1ULL) code |= 1ULL << bit;
            }
        }
        best = std::min(best, code);
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return best;
}

// All rooted posets on exactly n points up to isomorphism, root = point 0 and
// every point listed after the points above it.
inline std::vector<Poset> rootedPosetsExactly(std::size_t n) {
    std::vector<std::vector<std::uint64_t>> found;  // down masks
    std::set<std::uint64_t> codes;
    std::vector<std::uint64_t> down(n, 0);
    // up[j]: strict up-set of point j, chosen among earlier points.
    std::vector<std::uint64_t> up(n, 0);
    auto extend = [&](auto&& self, std::size_t j) -> void {
        if (j == n) {
            std::vector<std::uint64_t> d(n, 0);
            for (std::size_t q = 0; q < n; ++q) {
                d[q] |= 1ULL << q;
                for (std::size_t p = 0; p < n; ++p) {
                    if ((up[q] >> p) & 1ULL) d[p] |= 1ULL << q;
                }
            }
            if (codes.insert(canonicalCode(d)).second) found.push_back(d);
            return;
        }
        // Up-closed subsets of {0..j-1} containing the root.
        for (std::uint64_t s = 1; s < (1ULL << j); ++s) {
            if ((s & 1ULL) == 0) continue;
            bool closed = true;
            for (std::size_t p = 0; p < j && closed; ++p) {
                if (((s >> p) & 1ULL) && (up[p] & ~s) != 0) closed = false;
            }
            if (!closed) continue;
            up[j] = s;
            self(self, j + 1);
        }
    };
    if (n == 1) {
        found.push_back({1});
    } else {
        extend(extend, 1);
    }
    std::vector<Poset> out;
    for (const auto& d : found) {
        std::vector<PointSet> sets(n, PointSet(n));
        for (std::size_t i = 0; i < n; ++i) sets[i].words()[0] = d[i];
        out.push_back(Poset::fromDownsets(std::move(sets), {}, false));
    }
    return out;
}

}  // namespace detail

// Rooted posets with exactly n points, each isomorphism class once.
inline const std::vector<Poset>& enumerateRootedPosetsExactly(std::size_t n, std::size_t cap = kDefaultPosetCap) {
    if (n == 0 || n > cap || n > 8) {
        throw CapExceeded("rooted poset enumeration supports 1.." + std::to_string(std::min<std::size_t>(cap, 8)) +
                          " points");
    }
    static std::mutex mutex;
    static std::map<std::size_t, std::vector<Poset>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::rootedPosetsExactly(n)).first;
    return it->second;
}

// Rooted posets with at most n points, by increasing size.
inline std::vector<Poset> enumerateRootedPosets(std::size_t n, std::size_t cap = kDefaultPosetCap) {
    std::vector<Poset> out;
    for (std::size_t k = 1; k <= n; ++k) {
        const auto& level = enumerateRootedPosetsExactly(k, cap);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

// Downward closed subsets, i.e. the order-preserving maps into 2.
inline std::vector<PointSet> downsets(const Poset& P) {
    std::vector<PointSet> out;
    auto order = P.bottomUp();
    PointSet cur(P.size());
    auto go = [&](auto&& self, std::size_t i) -> void {
        if (i == order.size()) {
            out.push_back(cur);
            return;
        }
        Point q = order[i];
        self(self, i + 1);
        if (P.strictlyBelow(q).isSubsetOf(cur)) {
            cur.set(q);
            self(self, i + 1);
            cur.reset(q);
        }
    };
    go(go, 0);
    return out;
}

inline constexpr std::uint64_t kDefaultLabelCap = 4096;

// Visits every order-preserving map P -> L once.
template <class Visitor>
void forEachEvaluation(const Poset& P, const std::shared_ptr<const LabelPoset>& L, Visitor&& visit,
                       std::size_t posetCap = kDefaultPosetCap, std::uint64_t labelCap = kDefaultLabelCap) {
    if (P.size() > posetCap) throw CapExceeded("evaluation enumeration: poset larger than the cap");
    if (L->size() > labelCap) throw CapExceeded("evaluation enumeration: label poset larger than the cap");
    auto order = P.bottomUp();
    std::reverse(order.begin(), order.end());  // root first
    std::vector<Label> values(P.size(), 0);
    auto go = [&](auto&& self, std::size_t i) -> void {
        if (i == order.size()) {
            visit(Evaluation(P, L, values));
            return;
        }
        Point q = order[i];
        for (Label l = 0; l < L->size(); ++l) {
            bool ok = true;
            P.up(q).forEach([&](Point p) {
                if (p != q && !L->leq(l, values[p])) ok = false;
            });
            if (!ok) continue;
            values[q] = l;
            self(self, i + 1);
        }
    };
    go(go, 0);
}

inline std::vector<Evaluation> enumerateEvaluations(const Poset& P, const std::shared_ptr<const LabelPoset>& L,
                                                    std::size_t posetCap = kDefaultPosetCap,
                                                    std::uint64_t labelCap = kDefaultLabelCap) {
    std::vector<Evaluation> out;
    forEachEvaluation(P, L, [&](Evaluation e) { out.push_back(std::move(e)); }, posetCap, labelCap);
    return out;
}

}  // namespace ruitenburg::kripke
