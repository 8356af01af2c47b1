#pragma once

// IPC formula syntax: construction, parsing, rendering, substitution and the
// iteration sequence A^1 = A, A^{i+1} = A(A^i / x).
//
// Formulas are immutable trees of shared nodes. Substitution shares the
// substituted argument instead of copying it, so the i-th iterate is linear in
// i as a dag even though its tree size is exponential.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ruitenburg/error.hpp"

namespace ruitenburg::syntax {

inline bool isIdentifier(std::string_view text) {
    if (text.empty()) return false;
    auto head = static_cast<unsigned char>(text.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || u == '_')) return false;
    }
    return text != "false" && text != "true";
}

// Propositional letter. Compared by exact text.
class VariableName {
public:
    VariableName(const char* text) : VariableName(std::string(text)) {}  // NOLINT: literal convenience
    explicit VariableName(std::string text) : text_(std::move(text)) {
        if (!isIdentifier(text_)) {
            throw InputError("invalid variable name '" + text_ + "'");
        }
    }

    const std::string& str() const noexcept { return text_; }

    friend bool operator==(const VariableName&, const VariableName&) = default;
    friend auto operator<=>(const VariableName&, const VariableName&) = default;

private:
    std::string text_;
};

enum class Kind : std::uint8_t { Atom, Bottom, Conj, Disj, Impl };

namespace detail {

inline std::uint64_t mix(std::uint64_t h) {
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

inline std::uint64_t saturatingAdd(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                             : a + b;
}

struct Node {
    Kind kind;
    std::string name;  // Atom only
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::uint64_t hash;
    unsigned degree;
    std::uint64_t connectives;  // tree count, saturating
};

}  // namespace detail

class Formula {
public:
    static Formula atom(const VariableName& name) {
        auto h = detail::mix(std::hash<std::string>{}(name.str()) ^ 0x1234567ULL);
        return Formula(std::make_shared<const detail::Node>(
            detail::Node{Kind::Atom, name.str(), nullptr, nullptr, h, 0, 0}));
    }

    static Formula bottom() {
        static const auto node = std::make_shared<const detail::Node>(
            detail::Node{Kind::Bottom, {}, nullptr, nullptr, detail::mix(0xb0770bULL), 0, 0});
        return Formula(node);
    }

    static Formula conj(const Formula& a, const Formula& b) { return binary(Kind::Conj, a, b); }
    static Formula disj(const Formula& a, const Formula& b) { return binary(Kind::Disj, a, b); }
    static Formula impl(const Formula& a, const Formula& b) { return binary(Kind::Impl, a, b); }

    // Sugar, expanded on construction.
    static Formula neg(const Formula& a) { return impl(a, bottom()); }
    static Formula top() { return impl(bottom(), bottom()); }
    static Formula iff(const Formula& a, const Formula& b) { return conj(impl(a, b), impl(b, a)); }

    Kind kind() const noexcept { return node_->kind; }
    bool isAtom() const noexcept { return kind() == Kind::Atom; }
    bool isBottom() const noexcept { return kind() == Kind::Bottom; }
    bool isBinary() const noexcept { return node_->left != nullptr; }

    VariableName name() const { return VariableName(node_->name); }
    const std::string& atomText() const noexcept { return node_->name; }
    Formula left() const { return Formula(node_->left); }
    Formula right() const { return Formula(node_->right); }

    std::uint64_t hash() const noexcept { return node_->hash; }
    unsigned degree() const noexcept { return node_->degree; }
    // Number of binary connectives in the tree expansion; saturates at 2^64-1.
    std::uint64_t connectives() const noexcept { return node_->connectives; }

    // Node identity, for memo tables keyed on shared structure.
    const detail::Node* id() const noexcept { return node_.get(); }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.hash() != b.hash()) return false;
        std::set<std::pair<const detail::Node*, const detail::Node*>> seen;
        return equalNodes(a.node_.get(), b.node_.get(), seen);
    }

private:
    explicit Formula(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

    static Formula binary(Kind kind, const Formula& a, const Formula& b) {
        std::uint64_t h = detail::mix(static_cast<std::uint64_t>(kind) * 0x9e3779b97f4a7c15ULL ^ a.hash());
        h = detail::mix(h ^ (b.hash() + 0x632be59bd9b4e019ULL));
        unsigned d = std::max(a.degree(), b.degree()) + (kind == Kind::Impl ? 1U : 0U);
        auto c = detail::saturatingAdd(detail::saturatingAdd(a.connectives(), b.connectives()), 1);
        return Formula(std::make_shared<const detail::Node>(
            detail::Node{kind, {}, a.node_, b.node_, h, d, c}));
    }

    // Pairs already known equal are remembered so that comparing two
    // independently built iterates stays linear in their dag size.
    static bool equalNodes(const detail::Node* a, const detail::Node* b,
                           std::set<std::pair<const detail::Node*, const detail::Node*>>& seen) {
        if (a == b) return true;
        if (a->hash != b->hash || a->kind != b->kind) return false;
        if (a->kind == Kind::Atom) return a->name == b->name;
        if (a->kind == Kind::Bottom) return true;
        auto key = std::make_pair(a, b);
        if (seen.count(key) != 0) return true;
        bool eq = equalNodes(a->left.get(), b->left.get(), seen) &&
                  equalNodes(a->right.get(), b->right.get(), seen);
        if (eq) seen.insert(key);
        return eq;
    }

    std::shared_ptr<const detail::Node> node_;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const noexcept { return static_cast<std::size_t>(f.hash()); }
};

// --- measures ---------------------------------------------------------------

// Implicational degree: nesting depth of ->.
inline unsigned degree(const Formula& a) { return a.degree(); }

inline std::set<VariableName> atoms(const Formula& a) {
    std::set<VariableName> out;
    std::unordered_set<const detail::Node*> seen;
    std::vector<Formula> stack{a};
    while (!stack.empty()) {
        Formula f = stack.back();
        stack.pop_back();
        if (!seen.insert(f.id()).second) continue;
        if (f.isAtom()) {
            out.insert(f.name());
        } else if (f.isBinary()) {
            stack.push_back(f.left());
            stack.push_back(f.right());
        }
    }
    return out;
}

// True iff every occurrence of x sits to the left of an even number of arrows.
inline bool isPositive(const Formula& a, const VariableName& x) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::pair<Formula, bool>> stack{{a, true}};
    while (!stack.empty()) {
        auto [f, positive] = stack.back();
        stack.pop_back();
        auto key = reinterpret_cast<std::uintptr_t>(f.id()) * 2 + (positive ? 1 : 0);
        if (!seen.insert(key).second) continue;
        if (f.isAtom()) {
            if (!positive && f.atomText() == x.str()) return false;
        } else if (f.isBinary()) {
            bool flip = f.kind() == Kind::Impl;
            stack.emplace_back(f.left(), flip ? !positive : positive);
            stack.emplace_back(f.right(), positive);
        }
    }
    return true;
}

// Number of distinct nodes in the shared representation.
inline std::size_t dagSize(const Formula& a) {
    std::unordered_set<const detail::Node*> seen;
    std::vector<Formula> stack{a};
    while (!stack.empty()) {
        Formula f = stack.back();
        stack.pop_back();
        if (!seen.insert(f.id()).second) continue;
        if (f.isBinary()) {
            stack.push_back(f.left());
            stack.push_back(f.right());
        }
    }
    return seen.size();
}

// --- substitution and iteration ---------------------------------------------

// Replace every Atom(x) in a by b. Shared subterms of a stay shared.
inline Formula substitute(const Formula& a, const VariableName& x, const Formula& b) {
    std::unordered_map<const detail::Node*, Formula> memo;
    std::function<Formula(const Formula&)> go = [&](const Formula& f) -> Formula {
        if (f.isAtom()) return f.atomText() == x.str() ? b : f;
        if (f.isBottom()) return f;
        if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
        Formula l = go(f.left());
        Formula r = go(f.right());
        Formula out = (l.id() == f.left().id() && r.id() == f.right().id())
                          ? f
                          : (f.kind() == Kind::Conj   ? Formula::conj(l, r)
                             : f.kind() == Kind::Disj ? Formula::disj(l, r)
                                                      : Formula::impl(l, r));
        memo.emplace(f.id(), out);
        return out;
    };
    return go(a);
}

inline Formula iterate(const Formula& a, const VariableName& x, std::size_t i) {
    if (i == 0) throw InputError("iterate: the exponent must be at least 1");
    Formula cur = a;
    for (std::size_t k = 1; k < i; ++k) cur = substitute(a, x, cur);
    return cur;
}

// Lazily extended A^0 = x, A^1 = A, A^2, ... for one (A, x).
class IterateSequence {
public:
    IterateSequence(Formula a, VariableName x) : a_(std::move(a)), x_(std::move(x)) {
        cache_.push_back(Formula::atom(x_));
        cache_.push_back(a_);
    }

    Formula at(std::size_t i) {
        while (cache_.size() <= i) cache_.push_back(substitute(a_, x_, cache_.back()));
        return cache_[i];
    }

    const Formula& base() const noexcept { return a_; }
    const VariableName& variable() const noexcept { return x_; }

private:
    Formula a_;
    VariableName x_;
    std::vector<Formula> cache_;
};

// --- rendering --------------------------------------------------------------

struct RenderOptions {
    bool sugar = false;  // print A->false as ~A and false->false as true
};

namespace detail {

// Binding strength, higher binds tighter.
enum Level : int { LevelImpl = 1, LevelDisj = 2, LevelConj = 3, LevelUnary = 4, LevelAtom = 5 };

inline void renderInto(const Formula& f, int minLevel, const RenderOptions& opt, std::string& out) {
    auto wrap = [&](int level, auto&& body) {
        bool paren = level < minLevel;
        if (paren) out += '(';
        body();
        if (paren) out += ')';
    };
    switch (f.kind()) {
        case Kind::Atom:
            out += f.atomText();
            return;
        case Kind::Bottom:
            out += "false";
            return;
        case Kind::Conj:
            wrap(LevelConj, [&] {
                renderInto(f.left(), LevelConj, opt, out);
                out += " & ";
                renderInto(f.right(), LevelUnary, opt, out);
            });
            return;
        case Kind::Disj:
            wrap(LevelDisj, [&] {
                renderInto(f.left(), LevelDisj, opt, out);
                out += " | ";
                renderInto(f.right(), LevelConj, opt, out);
            });
            return;
        case Kind::Impl:
            if (opt.sugar && f.right().isBottom()) {
                if (f.left().isBottom()) {
                    out += "true";
                    return;
                }
                wrap(LevelUnary, [&] {
                    out += '~';
                    renderInto(f.left(), LevelUnary, opt, out);
                });
                return;
            }
            wrap(LevelImpl, [&] {
                renderInto(f.left(), LevelDisj, opt, out);
                out += " -> ";
                renderInto(f.right(), LevelImpl, opt, out);
            });
            return;
    }
}

}  // namespace detail

inline std::string render(const Formula& f, const RenderOptions& opt = {}) {
    std::string out;
    detail::renderInto(f, detail::LevelImpl, opt, out);
    return out;
}

// --- parsing ----------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula parseAll() {
        skipSpace();
        if (pos_ == text_.size()) throw ParseError(pos_, "empty formula");
        Formula f = parseIff();
        skipSpace();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skipSpace();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    // <-> and -> are right-associative; & and | associate to the left.
    Formula parseIff() {
        Formula lhs = parseImpl();
        if (accept("<->")) return Formula::iff(lhs, parseIff());
        return lhs;
    }

    Formula parseImpl() {
        Formula lhs = parseDisj();
        skipSpace();
        if (text_.substr(pos_, 3) != "<->" && accept("->")) return Formula::impl(lhs, parseImpl());
        return lhs;
    }

    Formula parseDisj() {
        Formula lhs = parseConj();
        while (accept("|")) lhs = Formula::disj(lhs, parseConj());
        return lhs;
    }

    Formula parseConj() {
        Formula lhs = parseUnary();
        while (accept("&")) lhs = Formula::conj(lhs, parseUnary());
        return lhs;
    }

    Formula parseUnary() {
        if (accept("~")) return Formula::neg(parseUnary());
        return parsePrimary();
    }

    Formula parsePrimary() {
        skipSpace();
        if (pos_ == text_.size()) throw ParseError(pos_, "unexpected end of input");
        if (accept("(")) {
            Formula inner = parseIff();
            if (!accept(")")) throw ParseError(pos_, "expected ')'");
            return inner;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        std::string_view word = text_.substr(start, pos_ - start);
        if (word.empty()) throw ParseError(start, "unexpected '" + std::string(1, text_[start]) + "'");
        if (word == "false") return Formula::bottom();
        if (word == "true") return Formula::top();
        if (!isIdentifier(word)) throw ParseError(start, "bad identifier '" + std::string(word) + "'");
        return Formula::atom(VariableName(std::string(word)));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(std::string_view text) { return detail::Parser(text).parseAll(); }

}  // namespace ruitenburg::syntax
