#include "amdl/core.hpp"
#include "amdl/instance_io.hpp"
#include "amdl/instances.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

using namespace amdl;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Rational frac(long long num, long long den) { return Rational(num) / Rational(den); }

} // namespace

TEST(Loss, Prop1ReferenceErrsWithMassEpsEverywhere) {
    const Rational eps = frac(1, 20);
    const auto inst = genProp1<Rational>(4, eps);
    for (std::size_t i = 0; i < inst.k(); ++i) EXPECT_EQ(loss(inst.hypotheses()[0], inst.distribution(i)), eps);
}

TEST(Loss, ConsistentLabelsGiveZero) {
    const Hypothesis h({1, -1, 1});
    const LabeledDistribution d({0.2, 0.3, 0.5}, {1.0, 0.0, 1.0});
    EXPECT_EQ(loss(h, d), 0.0);
}

TEST(Loss, ConstantPositiveOnTwoNoisyPoints) {
    const auto h = Hypothesis::constant(2, kPositive);
    const BasicLabeledDistribution<Rational> d({frac(1, 2), frac(1, 2)}, {frac(1, 4), frac(3, 4)});
    EXPECT_EQ(loss(h, d), frac(1, 2));
    const LabeledDistribution dd({0.5, 0.5}, {0.25, 0.75});
    EXPECT_EQ(loss(h, dd), 0.5);
}

TEST(Loss, DimensionMismatchIsAContractError) {
    const Hypothesis h({1, 1});
    const LabeledDistribution d({1.0}, {1.0});
    EXPECT_THROW(loss(h, d), contract_error);
}

TEST(WorstLoss, AgnosticFamilyBestHypothesis) {
    const Rational nu = frac(2, 5), eps = frac(1, 20);
    const auto inst = genAgnosticLb<Rational>(4, nu, eps);
    EXPECT_EQ(worstLoss(inst.hypotheses()[0], inst), nu - 2 * eps);
    EXPECT_EQ(loss(inst.hypotheses()[0], inst.distribution(0)), Rational(0));
}

TEST(WorstLoss, SingleDistributionReducesToLoss) {
    std::mt19937_64 rng(7);
    const auto inst = gen::randomInstance(rng, {5, 6, 1});
    for (const auto& h : inst.hypotheses()) EXPECT_EQ(worstLoss(h, inst), loss(h, inst.distribution(0)));
}

TEST(WorstLoss, DuplicateSupportMatchesPureHypothesis) {
    const Rational nu = frac(2, 5), eps = frac(1, 20);
    const auto inst = genAgnosticLb<Rational>(3, nu, eps);
    const RandomizedHypothesis twice{{1, 1}};
    EXPECT_EQ(worstLoss(twice, inst), worstLoss(inst.hypotheses()[1], inst));
}

TEST(WorstLoss, UniformMixtureAveragesLosses) {
    // Each pure hypothesis is perfect on one distribution and wrong on mass 2g of the other.
    const Rational g = frac(1, 10);
    const Rational z(0), one(1);
    BasicLabeledDistribution<Rational> a({one - 2 * g, 2 * g, z, z}, {one, one, z, z});
    BasicLabeledDistribution<Rational> b({z, z, one - 2 * g, 2 * g}, {z, z, z, one});
    HypothesisClass cls({Hypothesis({1, 1, -1, -1}), Hypothesis({1, -1, -1, 1})});
    BasicInstance<Rational> game(cls, {a, b});
    EXPECT_EQ(worstLoss(cls[0], game), 2 * g);
    EXPECT_EQ(worstLoss(cls[1], game), 2 * g);
    const RandomizedHypothesis mix{{0, 1}};
    EXPECT_EQ(worstLoss(mix, game), g);
    for (std::size_t i = 0; i < game.k(); ++i)
        EXPECT_EQ(loss(mix, cls, game.distribution(i)), (loss(cls[0], game.distribution(i)) + loss(cls[1], game.distribution(i))) / 2);
}

TEST(Disagreement, Prop1SingleFlipHasMassEps) {
    const Rational eps = frac(1, 20);
    const auto inst = genProp1<Rational>(3, eps);
    const auto& cls = inst.hypotheses();
    for (std::size_t i = 1; i <= 3; ++i) EXPECT_EQ(disagreement(cls[0], cls[i], inst.distribution(i - 1)), eps);
}

TEST(Disagreement, IdentityAndComplement) {
    std::mt19937_64 rng(11);
    const auto inst = gen::randomInstance(rng, {6, 5, 2});
    for (const auto& h : inst.hypotheses()) {
        for (std::size_t i = 0; i < inst.k(); ++i) {
            EXPECT_EQ(disagreement(h, h, inst.distribution(i)), 0.0);
            EXPECT_NEAR(disagreement(h, h.complement(), inst.distribution(i)), 1.0, 1e-12);
        }
    }
}

TEST(MaxDisagreement, Prop1DistinctFlipsAreEpsApart) {
    const Rational eps = frac(1, 20);
    const auto inst = genProp1<Rational>(4, eps);
    const auto& cls = inst.hypotheses();
    for (std::size_t a = 1; a <= 4; ++a) {
        EXPECT_EQ(maxDisagreement(cls[a], cls[a], inst), Rational(0));
        for (std::size_t b = a + 1; b <= 4; ++b) EXPECT_EQ(maxDisagreement(cls[a], cls[b], inst), eps);
    }
}

TEST(DisagreementRegion, SingletonIsEmpty) {
    const auto inst = genProp1<double>(3, 0.1);
    EXPECT_TRUE(disagreementRegion(inst.hypotheses(), {2}).empty());
}

TEST(DisagreementRegion, Prop1ClassDisagreesOffTheHeavyPoint) {
    const auto inst = genProp1<double>(5, 0.1);
    EXPECT_EQ(disagreementRegion(inst.hypotheses(), fullVersionSpace(inst.hypotheses())),
              (std::vector<Point>{1, 2, 3, 4, 5}));
    const auto agree = agreementClassifier(inst.hypotheses(), fullVersionSpace(inst.hypotheses()));
    EXPECT_EQ(agree(0), kNegative);
}

TEST(DisagreementRegion, ComplementsDisagreeEverywhere) {
    const Hypothesis h({1, -1, -1, 1});
    HypothesisClass cls({h, h.complement()});
    EXPECT_EQ(disagreementRegion(cls, {0, 1}).size(), 4u);
}

TEST(DisagreementRegion, EmptyVersionSpaceIsAContractError) {
    const auto inst = genProp1<double>(2, 0.1);
    EXPECT_THROW(disagreementRegion(inst.hypotheses(), {}), contract_error);
}

TEST(BestNu, AgnosticFamilyPicksFirstHypothesis) {
    const Rational nu = frac(2, 5), eps = frac(1, 20);
    const auto inst = genAgnosticLb<Rational>(4, nu, eps);
    const auto best = bestNu(inst);
    EXPECT_EQ(best.index, 0u);
    EXPECT_EQ(best.nu, nu - 2 * eps);
    EXPECT_EQ(worstLoss(inst.hypotheses()[1], inst), nu);
}

TEST(BestNu, RealizableInstanceHasZero) {
    std::mt19937_64 rng(3);
    std::size_t target = 0;
    const auto inst = gen::realizableInstance(rng, {6, 8, 3}, target);
    const auto best = bestNu(inst);
    EXPECT_EQ(best.nu, 0.0);
    EXPECT_EQ(worstLoss(inst.hypotheses()[target], inst), 0.0);
}

TEST(BestNu, TiesGoToLowestIndex) {
    HypothesisClass cls({Hypothesis({1, 1}), Hypothesis({-1, 1}), Hypothesis({1, -1})});
    Instance inst(cls, {LabeledDistribution({0.5, 0.5}, {0.5, 0.5})});
    EXPECT_EQ(bestNu(inst).index, 0u);
}

TEST(BestNu, MatchesJointPmfOracleOnRandomInstances) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = gen::randomInstance(rng, {4, 4, 3});
        const auto got = bestNu(inst);
        const auto want = oracle::bestNu(inst);
        EXPECT_EQ(got.index, want.index);
        EXPECT_NEAR(got.nu, want.nu, 1e-15);
    }
}

TEST(Validation, RejectsMalformedInputs) {
    EXPECT_THROW(Hypothesis({1, 0}), contract_error);
    EXPECT_THROW(HypothesisClass({Hypothesis({1}), Hypothesis({1})}), contract_error);
    EXPECT_THROW(HypothesisClass({Hypothesis({1}), Hypothesis({1, 1})}), contract_error);
    EXPECT_THROW(LabeledDistribution({0.5, 0.4}, {0.0, 0.0}), contract_error);
    EXPECT_THROW(LabeledDistribution({0.5, 0.5}, {0.0, 1.5}), contract_error);
    EXPECT_THROW(LabeledDistribution({1.5, -0.5}, {0.0, 0.0}), contract_error);
    EXPECT_NO_THROW(LabeledDistribution({0.5, 0.5 + 1e-13}, {0.0, 0.0}));
    HypothesisClass cls({Hypothesis({1, 1})});
    EXPECT_THROW(Instance(cls, {LabeledDistribution({1.0}, {1.0})}), contract_error);
    EXPECT_THROW(Instance(cls, {LabeledDistribution({0.5, 0.5}, {1.0, 0.0})}, 0.0), contract_error);
    EXPECT_NO_THROW(Instance(cls, {LabeledDistribution({0.5, 0.5}, {1.0, 0.0})}, 0.5));
}

// --- properties -------------------------------------------------------------

TEST(Properties, DisagreementIsAMetric) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = gen::randomInstance(rng, gen::randomShape(rng));
        const auto& cls = inst.hypotheses();
        std::uniform_int_distribution<std::size_t> pick(0, cls.size() - 1);
        const auto& a = cls[pick(rng)];
        const auto& b = cls[pick(rng)];
        const auto& c = cls[pick(rng)];
        EXPECT_EQ(maxDisagreement(a, b, inst), maxDisagreement(b, a, inst));
        EXPECT_LE(maxDisagreement(a, c, inst), maxDisagreement(a, b, inst) + maxDisagreement(b, c, inst) + 1e-15);
        for (std::size_t i = 0; i < inst.k(); ++i) {
            const auto& d = inst.distribution(i);
            EXPECT_LE(disagreement(a, c, d), disagreement(a, b, d) + disagreement(b, c, d) + 1e-15);
            // Zero distance iff the hypotheses agree on every supported point.
            bool agreeOnSupport = true;
            for (Point x = 0; x < d.size(); ++x)
                if (d.mass(x) > 0.0 && a(x) != b(x)) agreeOnSupport = false;
            EXPECT_EQ(disagreement(a, b, d) == 0.0, agreeOnSupport);
        }
    }
}

TEST(Properties, LossDifferenceBoundedByDisagreement) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = gen::randomInstance(rng, gen::randomShape(rng));
        const auto& cls = inst.hypotheses();
        for (std::size_t a = 0; a < cls.size(); ++a) {
            for (std::size_t b = 0; b < cls.size(); ++b) {
                for (std::size_t i = 0; i < inst.k(); ++i) {
                    const auto& d = inst.distribution(i);
                    const double la = loss(cls[a], d), lb = loss(cls[b], d), r = disagreement(cls[a], cls[b], d);
                    EXPECT_LE(std::fabs(la - lb), r + 1e-12);
                    EXPECT_LE(r, la + lb + 1e-12);
                }
            }
        }
    }
}

TEST(Properties, WorstLossNeverBeatsNu) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = gen::randomInstance(rng, gen::randomShape(rng));
        const double nu = bestNu(inst).nu;
        for (const auto& h : inst.hypotheses()) EXPECT_GE(worstLoss(h, inst), nu);
    }
}

TEST(Properties, DisagreementRegionIsMonotone) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = gen::randomInstance(rng, gen::randomShape(rng));
        const auto outer = gen::randomSubset(rng, inst.hypotheses().size());
        VersionSpace inner;
        for (std::size_t h : outer)
            if (rng() % 2 || inner.empty()) inner.push_back(h);
        const auto disInner = disagreementRegion(inst.hypotheses(), inner);
        const auto disOuter = disagreementRegion(inst.hypotheses(), outer);
        EXPECT_TRUE(std::includes(disOuter.begin(), disOuter.end(), disInner.begin(), disInner.end()));
    }
}

TEST(Properties, RepeatedEvaluationIsBitIdentical) {
    std::mt19937_64 rng(31);
    const auto inst = gen::randomInstance(rng, {8, 16, 4});
    for (const auto& h : inst.hypotheses()) {
        const double first = worstLoss(h, inst);
        for (int r = 0; r < 3; ++r) EXPECT_EQ(worstLoss(h, inst), first);
    }
}

TEST(InstanceFile, RoundTripsBitExactly) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = gen::randomInstance(rng, gen::randomShape(rng));
        const auto doc = toJson(inst, "rt", "random", {{"trial", trial}});
        const auto back = instanceFromJson(nlohmann::json::parse(doc.dump()));
        ASSERT_EQ(back.instance.k(), inst.k());
        EXPECT_EQ(back.id, "rt");
        for (std::size_t h = 0; h < inst.hypotheses().size(); ++h) EXPECT_EQ(back.instance.hypotheses()[h], inst.hypotheses()[h]);
        for (std::size_t i = 0; i < inst.k(); ++i) {
            for (Point x = 0; x < inst.domainSize(); ++x) {
                EXPECT_EQ(back.instance.distribution(i).mass(x), inst.distribution(i).mass(x));
                EXPECT_EQ(back.instance.distribution(i).eta(x), inst.distribution(i).eta(x));
            }
        }
    }
}

TEST(InstanceFile, SchemaErrors) {
    EXPECT_THROW(instanceFromJson(nlohmann::json::parse(R"({"hypotheses": [[1]], "distributions": []})")), schema_error);
    EXPECT_THROW(instanceFromJson(nlohmann::json::parse(R"({"m": 2, "hypotheses": [[1]], "distributions": [{"marginal": [1, 0], "eta_plus": [1, 1]}]})")),
                 schema_error);
    EXPECT_THROW(instanceFromJson(nlohmann::json::parse(R"({"m": 1, "hypotheses": [[1]], "distributions": [{"marginal": [1]}]})")),
                 schema_error);
}
