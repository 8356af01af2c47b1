#pragma once

// Bounded bisimulation between evaluations.
//
// u ~0 v iff the root labels agree, and u ~(n+1) v iff every restriction of u
// is ~n to some restriction of v and vice versa. The relations are computed
// for all point restrictions of a family of evaluations at once by partition
// refinement: the class of u_p at depth n+1 is determined by the set of depth-n
// classes met on the downset of p.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ruitenburg/bound.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/kripke.hpp"

namespace ruitenburg::bisim {

using kripke::Evaluation;
using kripke::Point;

// A natural depth or the unbounded game.
class BisimDepth {
public:
    constexpr BisimDepth(std::size_t n) : n_(n) {}  // NOLINT: depths read naturally as integers
    static constexpr BisimDepth infinite() { return BisimDepth(); }

    constexpr bool isInfinite() const noexcept { return !n_.has_value(); }
    constexpr std::size_t value() const { return *n_; }

private:
    constexpr BisimDepth() = default;
    std::optional<std::size_t> n_;
};

using ClassId = std::uint32_t;

// Depth-indexed class tables for every (evaluation, point) of a family of
// evaluations sharing one label poset. Class ids are assigned in order of
// first appearance, scanning evaluations and then points in index order.
class Refinement {
public:
    explicit Refinement(std::vector<Evaluation> family) : family_(std::move(family)) {
        for (std::size_t i = 1; i < family_.size(); ++i) {
            if (!(family_[i].labels() == family_[0].labels())) {
                throw InputError("bisimulation: evaluations use different label posets");
            }
        }
        std::map<kripke::Label, ClassId> ids;
        Table base;
        for (const auto& e : family_) {
            std::vector<ClassId> row(e.size());
            for (Point p = 0; p < e.size(); ++p) {
                row[p] = ids.emplace(e.at(p), static_cast<ClassId>(ids.size())).first->second;
            }
            base.classes.push_back(std::move(row));
        }
        base.count = ids.size();
        levels_.push_back(std::move(base));
    }

    std::size_t familySize() const noexcept { return family_.size(); }
    const Evaluation& member(std::size_t i) const { return family_[i]; }

    // Class of the restriction of member i at p, at the given depth.
    ClassId classOf(std::size_t i, Point p, BisimDepth depth) {
        return level(depth.isInfinite() ? stableDepth() : depth.value()).classes[i][p];
    }
    ClassId rootClass(std::size_t i, BisimDepth depth) {
        return classOf(i, family_[i].poset().root(), depth);
    }

    std::size_t classCount(std::size_t depth) { return level(depth).count; }

    // First depth d with ~d = ~(d+1); never exceeds the total number of points.
    std::size_t stableDepth() {
        for (std::size_t d = 0;; ++d) {
            std::size_t here = level(d).count;
            if (here == level(d + 1).count) return d;
        }
    }

private:
    struct Table {
        std::vector<std::vector<ClassId>> classes;
        std::size_t count = 0;
    };

    const Table& level(std::size_t depth) {
        while (levels_.size() <= depth) {
            const Table& prev = levels_.back();
            Table next;
            std::map<std::vector<ClassId>, ClassId> ids;
            std::vector<ClassId> signature;
            for (std::size_t i = 0; i < family_.size(); ++i) {
                const auto& P = family_[i].poset();
                std::vector<ClassId> row(P.size());
                for (Point p = 0; p < P.size(); ++p) {
                    signature.clear();
                    P.down(p).forEach([&](Point q) { signature.push_back(prev.classes[i][q]); });
                    std::sort(signature.begin(), signature.end());
                    signature.erase(std::unique(signature.begin(), signature.end()), signature.end());
                    row[p] = ids.emplace(signature, static_cast<ClassId>(ids.size())).first->second;
                }
                next.classes.push_back(std::move(row));
            }
            next.count = ids.size();
            levels_.push_back(std::move(next));
        }
        return levels_[depth];
    }

    std::vector<Evaluation> family_;
    std::vector<Table> levels_;
};

inline bool equivalent(const Evaluation& u, const Evaluation& v, BisimDepth depth) {
    if (!(u.labels() == v.labels())) throw InputError("bisimulation: label posets differ");
    Refinement r({u, v});
    return r.rootClass(0, depth) == r.rootClass(1, depth);
}

// Depth at which ~n stops refining for the pair (diagnostic).
inline std::size_t stabilizationDepth(const Evaluation& u, const Evaluation& v) {
    Refinement r({u, v});
    return r.stableDepth();
}

// Blocks of indices into `models`, each block sorted, blocks ordered by their
// smallest member.
using Partition = std::vector<std::vector<std::size_t>>;

inline Partition classesAtDepth(std::span<const Evaluation> models, BisimDepth depth) {
    if (models.empty()) return {};
    Refinement r(std::vector<Evaluation>(models.begin(), models.end()));
    std::map<ClassId, std::size_t> block;
    Partition out;
    for (std::size_t i = 0; i < models.size(); ++i) {
        auto c = r.rootClass(i, depth);
        auto [it, fresh] = block.emplace(c, out.size());
        if (fresh) out.emplace_back();
        out[it->second].push_back(i);
    }
    return out;
}

// Upper bound on the number of ~n classes: C_0 = |L|, C_{k+1} = |L| * 2^{C_k}.
// Crude on purpose; never claimed exact.
inline BigBound classCountBound(std::uint64_t labelCount, std::size_t n) {
    BigBound c{BigBound::Int(labelCount)};
    for (std::size_t k = 0; k < n; ++k) c = BigBound::timesPow2(BigBound::Int(labelCount), c);
    return c;
}

inline BigBound classCountBound(const kripke::LabelPoset& L, std::size_t n) { return classCountBound(L.size(), n); }

}  // namespace ruitenburg::bisim
