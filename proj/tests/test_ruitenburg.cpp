#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ruitenburg/corpus.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/ruitenburg.hpp"
#include "ruitenburg/sweep.hpp"

using namespace ruitenburg;
using syntax::Formula;
using syntax::parse;

TEST(FindIndex, Identity) {
    auto r = findIndex(parse("x"));
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.period, 1u);
    EXPECT_TRUE(r.witnesses.empty());
    EXPECT_FALSE(r.periodWitness);
    EXPECT_TRUE(r.holdsAtZero);
    EXPECT_EQ(r.iterates.size(), 3u);
}

TEST(FindIndex, Negation) {
    auto r = findIndex(parse("~x"));
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.period, 2u);
    ASSERT_TRUE(r.periodWitness);
    syntax::IterateSequence seq(parse("~x"), "x");
    EXPECT_TRUE(witnessHolds(*r.periodWitness, seq));
    EXPECT_EQ(r.periodWitness->model.size(), 1u);
    EXPECT_FALSE(r.holdsAtZero);
}

TEST(FindIndex, ImplicationIntoSideAtom) {
    auto r = findIndex(parse("x -> y"));
    EXPECT_EQ(r.index, 1u);
    EXPECT_EQ(r.period, 2u);
    EXPECT_EQ(r.iterates[2], parse("((x -> y) -> y) -> y"));
}

TEST(FindIndex, WitnessesForLargerIndex) {
    auto a = parse("y | ~x");
    auto r = findIndex(a);
    EXPECT_EQ(r.index, 2u);
    EXPECT_EQ(r.period, 2u);
    syntax::IterateSequence seq(a, "x");
    ASSERT_EQ(r.witnesses.size(), r.index - 1);
    for (const auto& w : r.witnesses) EXPECT_TRUE(witnessHolds(w, seq));
    EXPECT_TRUE(prover::equivIPC(seq.at(r.index + 2), seq.at(r.index)));
}

TEST(FindIndex, Errors) {
    EXPECT_THROW(findIndex(parse("x"), "x", 0), InputError);
    EXPECT_THROW(findIndex(parse("y | ~x"), "x", 1), ContractViolation);
}

TEST(FindIndex, OtherVariable) {
    auto r = findIndex(parse("~z & y"), "z");
    EXPECT_EQ(r.variable, syntax::VariableName("z"));
    EXPECT_EQ(r.index, 1u);
}

TEST(FindIndex, SmallCorpusHistogram) {
    corpus::Corpus c({"x", "y"}, 3);
    std::vector<Formula> fs;
    for (const auto& e : c.entries()) fs.push_back(e.formula);
    auto s = sweep::indexSweep(fs, "x", kDefaultMaxIndex);
    EXPECT_TRUE(s.violations.empty());
    using Key = std::pair<std::size_t, std::size_t>;
    std::map<Key, std::size_t> expected{{{1, 1}, 1116}, {{1, 2}, 213}, {{2, 1}, 52}, {{2, 2}, 13}};
    EXPECT_EQ(s.histogram, expected);
}

TEST(VerifyClassical, Examples) {
    EXPECT_TRUE(verifyClassical(parse("~x")));
    EXPECT_TRUE(verifyClassical(parse("x & y")));
    EXPECT_TRUE(verifyClassical(parse("x")));
}

TEST(VerifyClassical, RandomFormulas) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 200; ++i) {
        auto a = oracle::randomFormula(rng, {"x", "y", "z"}, i % 10);
        EXPECT_TRUE(verifyClassical(a)) << syntax::render(a);
        auto iff = Formula::iff(syntax::iterate(a, "x", 3), a);
        EXPECT_TRUE(oracle::tautology(iff, prover::detail::atomList(iff)));
    }
}

TEST(LeastFixpoint, Examples) {
    EXPECT_TRUE(prover::equivIPC(leastFixpoint(parse("y | x")), parse("y")));
    EXPECT_EQ(leastFixpoint(parse("x")), Formula::bottom());
    EXPECT_TRUE(prover::equivIPC(leastFixpoint(parse("y -> x")), parse("~y")));
    EXPECT_THROW(leastFixpoint(parse("x -> y")), NotPositiveError);
}

TEST(GreatestFixpoint, Examples) {
    EXPECT_EQ(greatestFixpoint(parse("x")), Formula::top());
    EXPECT_TRUE(prover::equivIPC(greatestFixpoint(parse("y & x")), parse("y")));
    EXPECT_TRUE(prover::equivIPC(greatestFixpoint(parse("y | x")), Formula::top()));
}

TEST(Fixpoint, ChainAndLeastness) {
    corpus::Corpus c({"x", "y"}, 3);
    std::vector<Formula> candidates;
    for (const auto& e : c.entries()) {
        if (e.connectives <= 2) candidates.push_back(e.formula);
    }
    std::size_t checked = 0;
    for (const auto& e : c.entries()) {
        if (!syntax::isPositive(e.formula, "x")) continue;
        ++checked;
        auto lo = leastFixpointReport(e.formula);
        auto hi = greatestFixpointReport(e.formula);
        EXPECT_LE(lo.steps, 10u);
        EXPECT_LE(hi.steps, 10u);
        for (std::size_t k = 0; k + 1 < lo.chain.size(); ++k) {
            EXPECT_TRUE(prover::isTheoremIPC(Formula::impl(lo.chain[k], lo.chain[k + 1])));
        }
        for (std::size_t k = 0; k + 1 < hi.chain.size(); ++k) {
            EXPECT_TRUE(prover::isTheoremIPC(Formula::impl(hi.chain[k + 1], hi.chain[k])));
        }
        EXPECT_TRUE(prover::isTheoremIPC(Formula::impl(lo.value, hi.value)));
        for (const auto& b : candidates) {
            if (!prover::equivIPC(syntax::substitute(e.formula, "x", b), b)) continue;
            EXPECT_TRUE(prover::isTheoremIPC(Formula::impl(lo.value, b))) << syntax::render(e.formula);
            EXPECT_TRUE(prover::isTheoremIPC(Formula::impl(b, hi.value))) << syntax::render(e.formula);
        }
    }
    EXPECT_GT(checked, 100u);
}

TEST(Fixpoint, BudgetIsAContractViolation) {
    EXPECT_THROW(fixpointFrom(parse("y | x"), "x", Formula::bottom(), 1), ContractViolation);
}

TEST(TheoreticalBound, HeightOne) {
    auto single = kripke::LabelPoset::explicitOrder(3, {});
    for (std::size_t n = 1; n <= 4; ++n) EXPECT_EQ(theoreticalBound(single, n), BigBound(1));
    EXPECT_EQ(theoreticalBound(kripke::LabelPoset::powerset({}), 2), BigBound(1));
}

TEST(TheoreticalBound, HeightTwo) {
    auto two = kripke::LabelPoset::two();
    for (std::size_t n = 1; n <= 3; ++n) {
        auto r = bisim::classCountBound(two.size() * 2, n - 1).squared();
        EXPECT_EQ(theoreticalBound(two, n), r * BigBound::Int(2) + BigBound::Int(1));
    }
    EXPECT_EQ(theoreticalBound(two, 1), BigBound(33));
}

TEST(TheoreticalBound, Monotone) {
    std::vector<kripke::LabelPoset> ls{kripke::LabelPoset::explicitOrder(1, {}), kripke::LabelPoset::two(),
                                       kripke::LabelPoset::explicitOrder(3, {{1, 0}, {2, 1}}),
                                       kripke::LabelPoset::powerset({"x", "y", "z"})};
    for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
        for (std::size_t n = 1; n <= 3; ++n) {
            EXPECT_LE(theoreticalBound(ls[i], n), theoreticalBound(ls[i + 1], n));
            EXPECT_LE(theoreticalBound(ls[i], n), theoreticalBound(ls[i], n + 1));
        }
    }
    EXPECT_THROW(theoreticalBound(ls[1], 0), InputError);
    EXPECT_FALSE(theoreticalBound(ls[3], 4).toString().empty());
}
