#pragma once

// Test-side reference implementations. Each one is written directly from the
// definitions and shares no code with the library beyond its value types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ruitenburg/formula.hpp"
#include "ruitenburg/kripke.hpp"

namespace oracle {

using ruitenburg::kripke::Evaluation;
using ruitenburg::kripke::Point;
using ruitenburg::syntax::Formula;
using ruitenburg::syntax::Kind;

// Forcing by the five clauses, recursively, at point p.
inline bool forces(const Evaluation& m, Point p, const Formula& a) {
    const auto& P = m.poset();
    switch (a.kind()) {
        case Kind::Atom: {
            auto i = m.labels().atomIndex(a.atomText());
            return i && ((m.at(p) >> *i) & 1ULL);
        }
        case Kind::Bottom: return false;
        case Kind::Conj: return forces(m, p, a.left()) && forces(m, p, a.right());
        case Kind::Disj: return forces(m, p, a.left()) || forces(m, p, a.right());
        case Kind::Impl:
            for (Point q = 0; q < P.size(); ++q) {
                if (P.leq(q, p) && forces(m, q, a.left()) && !forces(m, q, a.right())) return false;
            }
            return true;
    }
    return false;
}

inline bool truthValue(const Formula& a, const std::map<std::string, bool>& v) {
    switch (a.kind()) {
        case Kind::Atom: return v.at(a.atomText());
        case Kind::Bottom: return false;
        case Kind::Conj: return truthValue(a.left(), v) && truthValue(a.right(), v);
        case Kind::Disj: return truthValue(a.left(), v) || truthValue(a.right(), v);
        case Kind::Impl: return !truthValue(a.left(), v) || truthValue(a.right(), v);
    }
    return false;
}

inline bool tautology(const Formula& a, const std::vector<std::string>& atoms) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms.size()); ++mask) {
        std::map<std::string, bool> v;
        for (std::size_t i = 0; i < atoms.size(); ++i) v[atoms[i]] = (mask >> i) & 1ULL;
        if (!truthValue(a, v)) return false;
    }
    return true;
}

// Explicit n-move game: Player 1 picks a side and a point below the last
// pair, Player 2 answers on the other side, labels must match after each move.
inline bool game(const Evaluation& u, const Evaluation& v, std::size_t n) {
    if (n == 0) return u.rootLabel() == v.rootLabel();
    const auto& P = u.poset();
    const auto& Q = v.poset();
    std::function<bool(Point, Point, std::size_t)> wins = [&](Point p, Point q, std::size_t k) -> bool {
        if (k == 0) return true;
        for (Point p2 = 0; p2 < P.size(); ++p2) {
            if (!P.leq(p2, p)) continue;
            bool answered = false;
            for (Point q2 = 0; q2 < Q.size() && !answered; ++q2) {
                answered = Q.leq(q2, q) && u.at(p2) == v.at(q2) && wins(p2, q2, k - 1);
            }
            if (!answered) return false;
        }
        for (Point q2 = 0; q2 < Q.size(); ++q2) {
            if (!Q.leq(q2, q)) continue;
            bool answered = false;
            for (Point p2 = 0; p2 < P.size() && !answered; ++p2) {
                answered = P.leq(p2, p) && u.at(p2) == v.at(q2) && wins(p2, q2, k - 1);
            }
            if (!answered) return false;
        }
        return true;
    };
    return wins(P.root(), Q.root(), n);
}

// Rooted partial orders on n labeled points, counted up to isomorphism by
// brute force over all relations and all permutations.
inline std::size_t rootedPosetCount(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    std::set<std::vector<std::vector<bool>>> classes;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if ((mask >> b) & 1ULL) le[pairs[b].first][pairs[b].second] = true;
        }
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j < n && ok; ++j) {
                if (i != j && le[i][j] && le[j][i]) ok = false;
                for (std::size_t k = 0; k < n && ok; ++k) {
                    if (le[i][j] && le[j][k] && !le[i][k]) ok = false;
                }
            }
        }
        if (!ok) continue;
        bool rooted = false;
        for (std::size_t r = 0; r < n && !rooted; ++r) {
            rooted = true;
            for (std::size_t i = 0; i < n; ++i) rooted = rooted && le[i][r];
        }
        if (!rooted) continue;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::vector<bool>> best;
        do {
            std::vector<std::vector<bool>> img(n, std::vector<bool>(n));
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) img[perm[i]][perm[j]] = le[i][j];
            }
            if (best.empty() || img < best) best = img;
        } while (std::next_permutation(perm.begin(), perm.end()));
        classes.insert(best);
    }
    return classes.size();
}

// Random formula with exactly `size` connectives; ~ counts as one.
inline Formula randomFormula(std::mt19937_64& rng, const std::vector<std::string>& atoms, std::size_t size) {
    if (size == 0) {
        std::uniform_int_distribution<std::size_t> pick(0, atoms.size());
        std::size_t i = pick(rng);
        if (i == atoms.size()) return Formula::bottom();
        return Formula::atom(ruitenburg::syntax::VariableName(atoms[i]));
    }
    std::uniform_int_distribution<int> op(0, 3);
    int o = op(rng);
    if (o == 3) return Formula::neg(randomFormula(rng, atoms, size - 1));
    std::uniform_int_distribution<std::size_t> split(0, size - 1);
    std::size_t l = split(rng);
    Formula a = randomFormula(rng, atoms, l);
    Formula b = randomFormula(rng, atoms, size - 1 - l);
    return o == 0 ? Formula::conj(a, b) : o == 1 ? Formula::disj(a, b) : Formula::impl(a, b);
}

// Random formula of implicational degree at most d.
inline Formula randomOfDegree(std::mt19937_64& rng, const std::vector<std::string>& atoms, std::size_t d,
                              std::size_t size) {
    for (;;) {
        Formula f = randomFormula(rng, atoms, size);
        if (f.degree() <= d) return f;
        if (size > 0) --size;
    }
}

}  // namespace oracle
