#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"
#include "ruitenburg/corpus.hpp"
#include "ruitenburg/dynamics.hpp"
#include "ruitenburg/error.hpp"
#include "ruitenburg/sweep.hpp"

using namespace ruitenburg;
using dynamics::IterationTrace;
using dynamics::PairedEvaluation;
using kripke::Point;
using kripke::PointSet;
using kripke::Poset;
using syntax::Formula;
using syntax::parse;

namespace {

PointSet setOf(std::size_t n, std::initializer_list<Point> ps) {
    PointSet s(n);
    for (auto p : ps) s.set(p);
    return s;
}

PairedEvaluation bare(const Poset& P, std::initializer_list<Point> ones) {
    return PairedEvaluation(kripke::makeModel(P, {}, std::vector<kripke::Label>(P.size(), 0)), setOf(P.size(), ones));
}

// Chain root 0 above leaf 1, x-part 1 at the leaf only.
PairedEvaluation chainLeafOne() { return bare(Poset::chain(2), {1}); }

void forEachTrace(std::size_t maxPoints, std::size_t maxConnectives,
                  const std::function<void(const IterationTrace&)>& visit) {
    corpus::Corpus c({"x", "y"}, maxConnectives);
    auto L = std::make_shared<const kripke::LabelPoset>(kripke::LabelPoset::powerset({"y"}));
    for (const auto& P : kripke::enumerateRootedPosets(maxPoints)) {
        auto vs = kripke::enumerateEvaluations(P, L);
        auto us = kripke::downsets(P);
        for (const auto& e : c.entries()) {
            for (const auto& v : vs) {
                for (const auto& u : us) visit(dynamics::iterateModel(e.formula, "x", PairedEvaluation(v, u)));
            }
        }
    }
}

}  // namespace

TEST(Chi, Examples) {
    auto m = chainLeafOne();
    EXPECT_EQ(dynamics::onesOf(dynamics::chiStep(parse("x"), "x", m)), m.ones());
    auto one = bare(Poset::chain(1), {0});
    EXPECT_EQ(dynamics::onesOf(dynamics::chiStep(parse("~x"), "x", one)), setOf(1, {}));
    EXPECT_EQ(dynamics::onesOf(dynamics::chiStep(parse("~x"), "x", m)), setOf(2, {}));
}

TEST(Chi, RejectsUnknownAtoms) { EXPECT_THROW(dynamics::chiStep(parse("x & z"), "x", chainLeafOne()), AtomError); }

TEST(Chi, ConstantWhenFormulaIgnoresModel) {
    auto m = chainLeafOne();
    EXPECT_EQ(dynamics::onesOf(dynamics::chiStep(parse("true"), "x", m)), setOf(2, {0, 1}));
}

TEST(Paired, Validation) {
    auto v = kripke::makeModel(Poset::chain(2), {"y"}, {0, 1});
    EXPECT_THROW(PairedEvaluation(v, setOf(2, {0})), ValidationError);
    PairedEvaluation clash(kripke::makeModel(Poset::chain(1), {"x"}, {0}), setOf(1, {}));
    EXPECT_THROW(dynamics::fuse(clash, "x"), InputError);
    auto fused = dynamics::fuse(PairedEvaluation(v, setOf(2, {1})), "x");
    EXPECT_EQ(fused.labels().atoms(), (std::vector<std::string>{"y", "x"}));
    auto back = dynamics::split(fused, "x");
    EXPECT_EQ(back.ones(), setOf(2, {1}));
    EXPECT_EQ(back.v(), v);
}

TEST(Iterate, Identity) {
    auto t = dynamics::iterateModel(parse("x"), "x", chainLeafOne());
    EXPECT_EQ(t.index(), 0u);
    EXPECT_EQ(t.period(), 1u);
}

TEST(Iterate, NegationOnOnePoint) {
    auto t = dynamics::iterateModel(parse("~x"), "x", bare(Poset::chain(1), {0}));
    EXPECT_EQ(t.index(), 0u);
    EXPECT_EQ(t.period(), 2u);
    EXPECT_EQ(t.at(1), setOf(1, {}));
    EXPECT_EQ(t.at(2), setOf(1, {0}));
    EXPECT_TRUE(dynamics::isPeriodicPoint(t, 0, 0));
}

TEST(Iterate, NegationOnChain) {
    auto t = dynamics::iterateModel(parse("~x"), "x", chainLeafOne());
    EXPECT_EQ(t.index(), 1u);
    EXPECT_EQ(t.period(), 2u);
    EXPECT_EQ(t.at(1), setOf(2, {}));
    EXPECT_EQ(t.at(2), setOf(2, {0, 1}));
    EXPECT_EQ(t.at(3), t.at(1));
    EXPECT_EQ(t.at(40), t.at(2));
    EXPECT_FALSE(dynamics::isPeriodicPoint(t, 0, 0));
    EXPECT_TRUE(dynamics::isPeriodicPoint(t, 0, 1));
    EXPECT_TRUE(dynamics::isPeriodicPoint(t, 1, 0));
    EXPECT_EQ(t.perPointIndices(), (std::vector<std::size_t>{1, 0}));
}

TEST(Iterate, StepBudget) {
    EXPECT_THROW(dynamics::iterateModel(parse("~x"), "x", chainLeafOne(), 1), ContractViolation);
}

TEST(Frontier, Examples) {
    auto t = dynamics::iterateModel(parse("~x"), "x", chainLeafOne());
    EXPECT_EQ(dynamics::frontierPoints(t, 0), setOf(2, {0}));
    EXPECT_TRUE(dynamics::frontierPoints(t, 1).none());
    auto id = dynamics::iterateModel(parse("x"), "x", chainLeafOne());
    EXPECT_TRUE(dynamics::frontierPoints(id, 0).none());
}

TEST(Frontier, OnePointModels) {
    std::size_t nonPeriodic = 0;
    forEachTrace(1, 3, [&](const IterationTrace& t) {
        EXPECT_LE(t.index(), 1u);
        bool moving = !(t.at(2) == t.at(0));
        nonPeriodic += moving;
        EXPECT_EQ(dynamics::frontierPoints(t, 0).any(), moving);
        for (std::size_t k = 1; k < 4; ++k) EXPECT_TRUE(dynamics::frontierPoints(t, k).none());
    });
    EXPECT_GT(nonPeriodic, 0u);
    auto t = dynamics::iterateModel(parse("true"), "x", bare(Poset::chain(1), {}));
    EXPECT_EQ(t.index(), 1u);
    EXPECT_EQ(dynamics::frontierPoints(t, 0), setOf(1, {0}));
}

TEST(Partition, AllPeriodic) {
    auto t = dynamics::iterateModel(parse("x"), "x", bare(Poset::chain(3), {1, 2}));
    auto e = dynamics::partitionE(t, 0, 0);
    EXPECT_EQ(e.periodic, PointSet::full(3));
    EXPECT_TRUE(e.zero.none() && e.one.none() && e.mixed.none());
}

TEST(Partition, NegationOnChain) {
    auto t = dynamics::iterateModel(parse("~x"), "x", chainLeafOne());
    auto e = dynamics::partitionE(t, 0, 0);
    EXPECT_EQ(e.periodic, setOf(2, {1}));
    EXPECT_EQ(e.zero, setOf(2, {0}));
    EXPECT_TRUE(e.one.none());
    EXPECT_TRUE(e.mixed.none());
}

TEST(Partition, MixedInstance) {
    auto v = kripke::makeModel(Poset::chain(2), {"y"}, {0, 0});
    auto t = dynamics::iterateModel(parse("y"), "x", PairedEvaluation(v, setOf(2, {1})));
    EXPECT_EQ(t.index(), 1u);
    auto e = dynamics::partitionE(t, 0, 0);
    EXPECT_TRUE(e.periodic.none());
    EXPECT_TRUE(e.zero.none());
    EXPECT_EQ(e.one, setOf(2, {1}));
    EXPECT_EQ(e.mixed, setOf(2, {0}));
}

TEST(Partition, IsAPartitionOfTheDownset) {
    forEachTrace(4, 2, [](const IterationTrace& t) {
        const auto& P = t.poset();
        for (std::size_t k = 0; k <= t.index(); ++k) {
            for (Point p = 0; p < P.size(); ++p) {
                auto e = dynamics::partitionE(t, k, p);
                EXPECT_EQ(e.periodic | e.zero | e.one | e.mixed, P.down(p));
                EXPECT_EQ(e.periodic.count() + e.zero.count() + e.one.count() + e.mixed.count(), P.down(p).count());
                auto f = dynamics::frontierPoints(t, k) & P.down(p);
                EXPECT_TRUE(f.isSubsetOf(e.zero | e.one));
            }
        }
    });
}

TEST(Types, Examples) {
    auto id = dynamics::iterateModel(parse("x"), "x", bare(Poset::chain(3), {2}));
    dynamics::TypeAnalysis a(id, 1);
    for (Point p = 0; p < 3; ++p) {
        auto ty = a.pointType(0, p);
        EXPECT_EQ(ty.before, ty.after);
    }
    auto neg = dynamics::iterateModel(parse("~x"), "x", bare(Poset::chain(1), {0}));
    auto ty = dynamics::pointType(neg, 0, 1, 0);
    EXPECT_NE(ty.before, ty.after);
    auto t = dynamics::iterateModel(parse("~x"), "x", chainLeafOne());
    EXPECT_THROW(dynamics::pointType(t, 0, 1, 0), InputError);
    EXPECT_THROW(dynamics::TypeAnalysis(t, 0), InputError);
}

TEST(Rank, Examples) {
    auto constant = dynamics::iterateModel(parse("x"), "x", bare(Poset::fromRelation({0, 1, 2}, {{1, 0}, {2, 0}}), {}));
    for (Point p = 0; p < 3; ++p) EXPECT_EQ(dynamics::rank(constant, p, 1, 0), 1u);
    auto v = kripke::makeModel(Poset::chain(2), {"y"}, {0, 0});
    auto t = dynamics::iterateModel(parse("y"), "x", PairedEvaluation(v, setOf(2, {1})));
    EXPECT_EQ(dynamics::rank(t, 0, 1, 0), 0u);
    EXPECT_EQ(dynamics::rank(t, 0, 1, 1), 1u);
}

TEST(Rank, MonotoneAlongOrderAndSteps) {
    forEachTrace(4, 2, [](const IterationTrace& t) {
        const auto& P = t.poset();
        dynamics::TypeAnalysis a(t, dynamics::bIndex(t.formula()));
        for (std::size_t k = 0; k <= t.index() + 2; ++k) {
            for (Point p = 0; p < P.size(); ++p) {
                auto r = a.rank(k, p);
                EXPECT_LE(r, P.down(p).count());
                EXPECT_GE(a.rank(k + 1, p), r);
                P.down(p).forEach([&](Point q) { EXPECT_LE(a.rank(k, q), r); });
            }
        }
    });
}

TEST(Trace, BridgeAndBounds) {
    forEachTrace(4, 2, [](const IterationTrace& t) {
        const auto& P = t.poset();
        EXPECT_LE(t.index(), kripke::height(P));
        EXPECT_TRUE(t.period() == 1 || t.period() == 2);
        EXPECT_EQ(t.steps().size(), t.index() + t.period() + 1);
        for (Point p = 0; p < P.size(); ++p) EXPECT_LE(t.perPointIndex(p), t.index());
        auto fused = t.fusedAt(0);
        syntax::IterateSequence seq(t.formula(), t.variable());
        for (std::size_t k = 1; k <= 5; ++k) {
            auto ext = kripke::extension(fused, seq.at(k));
            ASSERT_EQ(ext, t.at(k)) << syntax::render(t.formula()) << " k=" << k;
        }
    });
}

TEST(Trace, FrontierClausesOnSweep) {
    corpus::Corpus c({"x", "y"}, 2);
    std::vector<Formula> fs;
    for (const auto& e : c.entries()) fs.push_back(e.formula);
    auto s = sweep::modelSweep(fs, "x", 4, {{}, {"y"}});
    EXPECT_TRUE(s.violations.empty());
    EXPECT_GT(s.frontierChecks, 0u);
    EXPECT_GT(s.clauseTwoInstances, 0u);
    EXPECT_LE(s.maxIndex, 4u);
}

// Non-periodic points of minimal rank whose downset carries one fused label
// on its non-periodic part stay pairwise ~n-equivalent under psi.
TEST(Trace, MinimalRankPointsStayEquivalent) {
    std::size_t instances = 0;
    forEachTrace(4, 2, [&](const IterationTrace& t) {
        const auto& P = t.poset();
        const std::size_t n = dynamics::bIndex(t.formula());
        dynamics::TypeAnalysis a(t, n);
        std::vector<kripke::Evaluation> family;
        for (std::size_t k = 0; k < t.steps().size(); ++k) family.push_back(t.fusedAt(k));
        bisim::Refinement r(family);
        for (std::size_t k = 0; k < t.index(); ++k) {
            const auto& fk = family[t.reduce(k)];
            for (Point p = 0; p < P.size(); ++p) {
                if (t.periodicAt(p, k)) continue;
                std::vector<Point> np;
                P.down(p).forEach([&](Point q) {
                    if (!t.periodicAt(q, k)) np.push_back(q);
                });
                bool minimal = true;
                bool constant = true;
                for (Point q : np) {
                    minimal = minimal && a.rank(k, q) == a.rank(k, p);
                    constant = constant && fk.at(q) == fk.at(p);
                }
                if (!minimal || !constant) continue;
                ++instances;
                for (std::size_t m = 0; m <= 3; ++m) {
                    for (Point q0 : np) {
                        for (Point q1 : np) {
                            EXPECT_EQ(r.classOf(t.reduce(k + m), q0, n), r.classOf(t.reduce(k + m), q1, n));
                        }
                    }
                }
            }
        }
    });
    EXPECT_GT(instances, 0u);
}

TEST(Combine, Examples) {
    using IP = dynamics::IndexPeriod;
    std::vector<IP> a{{0, 1}, {0, 2}, {1, 1}};
    EXPECT_EQ(dynamics::combineIndexPeriod(a), (IP{1, 2}));
    std::vector<IP> b{{0, 1}};
    EXPECT_EQ(dynamics::combineIndexPeriod(b), (IP{0, 1}));
    std::vector<IP> c{{3, 2}, {1, 2}};
    EXPECT_EQ(dynamics::combineIndexPeriod(c), (IP{3, 2}));
    EXPECT_THROW(dynamics::combineIndexPeriod(std::span<const IP>{}), InputError);
}

TEST(Combine, MatchesPerPointTraces) {
    forEachTrace(3, 2, [](const IterationTrace& t) {
        std::vector<dynamics::IndexPeriod> parts;
        for (Point p = 0; p < t.poset().size(); ++p) {
            auto sub = dynamics::iterateModel(
                t.formula(), t.variable(),
                PairedEvaluation(kripke::restrict(t.frozen(), p), kripke::restrict(t.evaluationAt(0), p)));
            parts.push_back({sub.index(), sub.period()});
        }
        auto whole = dynamics::combineIndexPeriod(parts);
        EXPECT_EQ(whole.index, t.index());
        EXPECT_EQ(whole.period, t.period());
    });
}

TEST(BIndex, Examples) {
    EXPECT_EQ(dynamics::bIndex(parse("x")), 1u);
    EXPECT_EQ(dynamics::bIndex(parse("~x")), 1u);
    EXPECT_EQ(dynamics::bIndex(parse("(x -> y) -> y")), 2u);
}

TEST(BIndex, HoldsOnSmallPairs) {
    std::vector<dynamics::ModelPair> pairs;
    std::vector<PairedEvaluation> models;
    for (const auto& P : kripke::enumerateRootedPosets(3)) {
        auto v = kripke::makeModel(P, {}, std::vector<kripke::Label>(P.size(), 0));
        for (const auto& u : kripke::downsets(P)) models.emplace_back(v, u);
    }
    for (const auto& a : models) {
        for (const auto& b : models) pairs.emplace_back(a, b);
    }
    EXPECT_TRUE(dynamics::bIndexHolds(parse("x"), "x", 1, pairs));
    for (const char* f : {"~x", "~~x", "x | ~x", "~x -> x"}) {
        auto a = parse(f);
        std::size_t n = dynamics::bIndex(a);
        EXPECT_TRUE(dynamics::bIndexHolds(a, "x", n, pairs)) << f;
        for (std::size_t k = 0; k <= 2; ++k) EXPECT_TRUE(dynamics::shiftHolds(a, "x", n, k, pairs)) << f << " " << k;
    }
}
