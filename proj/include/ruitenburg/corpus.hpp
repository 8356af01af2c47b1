#pragma once

// Canonical enumeration of formulas by connective count.
//
// Leaves are atoms; connectives are ~ (unary, counted once), &, |, ->. Within a
// size, formulas are listed as ~A, then A & B, A | B, A -> B by split and by the
// positions of A and B. Since & and | are commutative, only pairs whose left
// operand does not come after the right one are kept.

#include <cstdint>
#include <string>
#include <vector>

#include "ruitenburg/error.hpp"
#include "ruitenburg/formula.hpp"

namespace ruitenburg::corpus {

using syntax::Formula;

struct Entry {
    Formula formula;
    std::size_t connectives = 0;
};

inline constexpr std::size_t kMaxCorpusSize = 5'000'000;

class Corpus {
public:
    Corpus(std::vector<std::string> leaves, std::size_t maxConnectives, std::size_t cap = kMaxCorpusSize)
        : leaves_(std::move(leaves)) {
        if (leaves_.empty()) throw InputError("corpus needs at least one atom");
        for (const auto& l : leaves_) {
            if (!syntax::isIdentifier(l)) throw InputError("invalid atom name '" + l + "'");
        }
        start_.push_back(0);
        for (const auto& l : leaves_) entries_.push_back({Formula::atom(syntax::VariableName(l)), 0});
        start_.push_back(entries_.size());
        for (std::size_t k = 1; k <= maxConnectives; ++k) {
            for (std::size_t i = start_[k - 1]; i < start_[k]; ++i) push(Formula::neg(entries_[i].formula), k, cap);
            for (int op = 0; op < 3; ++op) {
                for (std::size_t ls = 0; ls + 1 <= k; ++ls) {
                    const std::size_t rs = k - 1 - ls;
                    const bool commutative = op != 2;
                    if (commutative && ls > rs) continue;
                    for (std::size_t i = start_[ls]; i < start_[ls + 1]; ++i) {
                        std::size_t j0 = (commutative && ls == rs) ? i : start_[rs];
                        for (std::size_t j = j0; j < start_[rs + 1]; ++j) {
                            const auto& l = entries_[i].formula;
                            const auto& r = entries_[j].formula;
                            push(op == 0 ? Formula::conj(l, r) : op == 1 ? Formula::disj(l, r) : Formula::impl(l, r),
                                 k, cap);
                        }
                    }
                }
            }
            start_.push_back(entries_.size());
        }
    }

    const std::vector<std::string>& leaves() const noexcept { return leaves_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t maxConnectives() const noexcept { return start_.size() - 2; }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    // Entries with exactly k connectives occupy [begin(k), end(k)).
    std::size_t begin(std::size_t k) const { return start_.at(k); }
    std::size_t end(std::size_t k) const { return start_.at(k + 1); }

private:
    void push(Formula f, std::size_t k, std::size_t cap) {
        if (entries_.size() >= cap) throw CapExceeded("corpus exceeds " + std::to_string(cap) + " formulas");
        entries_.push_back({std::move(f), k});
    }

    std::vector<std::string> leaves_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> start_;
};

}  // namespace ruitenburg::corpus
