#pragma once
//
// Distribution-dependent active learners.
//
// activeLargeEps halves the target error every epoch, runs the passive
// solver on the induced distributions (labels only on DIS(V_{n-1})) and keeps
// the hypotheses within 2 eps_n of the solver's output. activeSmallEps runs it
// once at eps' = 100 nu to get a small version space V0, buys a labeled
// sample of AGR(V0) up front, and then runs the passive solver on surrogates
// that reuse that sample.
//

#include "amdl/config.hpp"
#include "amdl/core.hpp"
#include "amdl/hedge.hpp"
#include "amdl/oracle.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace amdl {

/// What the active learners need besides the instance: knobs and the
/// exact complexity parameters (computed once by the caller).
struct LearnerContext {
    Knobs knobs{};
    std::size_t vcDim = 1;
    std::size_t starNumber = 1;
    bool keepVersionSpaces = false;
    bool keepHedgeTrace = false;
};

struct EpochSchedule {
    std::size_t epochs = 0;

    static EpochSchedule forTarget(double eps) {
        require(eps > 0.0, "target error must be positive");
        const double n = std::ceil(std::log2(1.0 / eps));
        return {n > 0.0 ? static_cast<std::size_t>(n) : 0};
    }
    static double epsAt(std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n)); }
    static double deltaAt(double delta, std::size_t n) {
        const double nn = static_cast<double>(n);
        return delta / (2.0 * nn * nn);
    }
};

/// One epoch of the shrinking version-space scheme.
struct EpochTrace {
    std::size_t epoch = 0;
    double epsN = 0.0;
    std::size_t vSize = 0;
    double maxDisMass = 0.0; // max_i Pr_{D_i}[DIS(V_n)]
    std::uint64_t passiveSamples = 0;
    std::uint64_t labels = 0;
    bool subsetOfPrevious = true;
    double maxRadius = 0.0; // max over kept h of rho(h, h_n)
    VersionSpace members;   // only when LearnerContext::keepVersionSpaces
    std::vector<double> center; // plus-fractions of h_n, same condition
};

/// One epoch of the distribution-free scheme.
struct DfEpochTrace {
    std::size_t epoch = 0;
    double epsN = 0.0;
    double abstainMassMax = 0.0;
    std::size_t roundsUsed = 0;
    std::uint64_t labels = 0;
};

struct ActiveRunResult {
    std::optional<RandomizedHypothesis> output;
    bool randomized = false;
    std::string branch;
    FailureMode failure = FailureMode::none;
    std::size_t failureEpoch = 0;
    std::vector<EpochTrace> epochs;
    std::vector<DfEpochTrace> dfEpochs;
    std::vector<HedgeRoundTrace> hedgeTrace;
    std::vector<std::string> warnings;
    std::uint64_t agreementLabels = 0; // small-eps stage-2 up-front queries
    std::uint64_t finalSolverLabels = 0;
    bool degenerateAgreement = false;
    std::optional<AbstainingClassifier> rpuClassifier; // last refined RPU classifier (distribution-free)
    QueryLedger ledger;

    bool ok() const noexcept { return failure == FailureMode::none && output.has_value(); }
};

namespace detail {

inline double maxDisMass(const Instance& inst, const VersionSpace& v) {
    const auto rule = agreementClassifier(inst.hypotheses(), v);
    double worst = 0.0;
    for (std::size_t i = 0; i < inst.k(); ++i) worst = std::max(worst, abstentionMass(rule, inst.distribution(i)));
    return worst;
}

} // namespace detail

/// Version-space learner for the regime eps >= 100 nu. Returns the lowest
/// index member of the final version space, or a collapse failure.
inline ActiveRunResult activeLargeEps(OracleSet& oracles, double eps, double delta, const LearnerContext& ctx) {
    require(eps > 0.0, "target error must be positive");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    const Instance& inst = oracles.instance();
    const auto& cls = inst.hypotheses();
    const std::size_t k = inst.k();

    ActiveRunResult result;
    result.branch = "large";
    const double nu = bestNu(inst).nu;
    if (eps < 100.0 * nu) result.warnings.push_back("target below 100*nu: outside the large-eps regime");

    const auto schedule = EpochSchedule::forTarget(eps);
    VersionSpace v = fullVersionSpace(cls);
    for (std::size_t n = 1; n <= schedule.epochs; ++n) {
        const std::uint64_t labelsBefore = oracles.ledger().totalLabels();
        const double epsN = EpochSchedule::epsAt(n);
        SolverConfig solver{epsN, EpochSchedule::deltaAt(delta, n), epsN / 100.0, ctx.knobs};

        const auto sampler = inducedSampler(oracles, ImputationRule(cls, v));
        auto hedge = mdlHedgeVc(cls, v, k, sampler, solver, ctx.vcDim, ctx.keepHedgeTrace);
        const auto center = hedge.output.plusFraction<double>(cls);

        EpochTrace trace;
        trace.epoch = n;
        trace.epsN = epsN;
        trace.passiveSamples = hedge.storeDraws + hedge.rewardDraws;
        VersionSpace next;
        for (std::size_t h : v) {
            const double radius = maxSoftDisagreement<double>(cls[h], center, inst);
            if (radius <= 2.0 * epsN) {
                next.push_back(h);
                trace.maxRadius = std::max(trace.maxRadius, radius);
            }
        }
        trace.subsetOfPrevious = isSubset(next, v);
        trace.vSize = next.size();
        trace.labels = oracles.ledger().totalLabels() - labelsBefore;
        if (ctx.keepHedgeTrace) result.hedgeTrace = std::move(hedge.trace);

        if (next.empty()) {
            trace.maxDisMass = 0.0;
            result.epochs.push_back(std::move(trace));
            result.failure = FailureMode::version_space_collapse;
            result.failureEpoch = n;
            result.ledger = oracles.ledger();
            return result;
        }
        trace.maxDisMass = detail::maxDisMass(inst, next);
        if (ctx.keepVersionSpaces) {
            trace.members = next;
            trace.center = center;
        }
        result.epochs.push_back(std::move(trace));
        v = std::move(next);
    }
    result.output = RandomizedHypothesis::pure(v.front());
    result.ledger = oracles.ledger();
    return result;
}

/// Two-stage learner for the regime eps < 100 nu; nu is supplied exactly.
inline ActiveRunResult activeSmallEps(OracleSet& oracles, double eps, double delta, double nu,
                                      const LearnerContext& ctx) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    require(nu > 0.0 && nu < 1.0, "the small-eps learner needs nu in (0,1)");
    const Instance& inst = oracles.instance();
    const auto& cls = inst.hypotheses();
    const std::size_t k = inst.k();

    const double epsPrime = std::min(100.0 * nu, 1.0);
    const double deltaPrime = delta / 6.0;

    auto stage1 = activeLargeEps(oracles, epsPrime, deltaPrime, ctx);
    ActiveRunResult result;
    result.branch = "small";
    result.epochs = std::move(stage1.epochs);
    if (eps >= 100.0 * nu) result.warnings.push_back("target at or above 100*nu: the large-eps learner is the intended one");
    if (!stage1.ok()) {
        result.failure = stage1.failure;
        result.failureEpoch = stage1.failureEpoch;
        result.ledger = oracles.ledger();
        return result;
    }

    // V0: everything within 2 eps' of the stage-one output.
    const auto& hPrime = cls[stage1.output->support.front()];
    VersionSpace v0;
    for (std::size_t h = 0; h < cls.size(); ++h)
        if (maxDisagreement(cls[h], hPrime, inst) <= 2.0 * epsPrime) v0.push_back(h);
    const ImputationRule rule(cls, v0);

    const std::uint64_t n0 =
        ceilCount(ctx.knobs.cN0 * 100.0 * (eps + nu) / (eps * eps) * std::log(static_cast<double>(k) / deltaPrime));
    const std::uint64_t labelsBefore = oracles.ledger().totalLabels();
    std::vector<std::vector<Example>> agreement(k);
    for (std::size_t i = 0; i < k; ++i) {
        try {
            agreement[i] = sampleConditionalAgreement(oracles, i, rule, n0);
        } catch (const degenerate_agreement&) {
            // AGR(V0) is null under D_i, so D'_i is D_i itself and the
            // surrogate sampler never reaches the resampling branch.
            result.degenerateAgreement = true;
            result.warnings.push_back("degenerate agreement region for distribution " + std::to_string(i));
        }
    }
    result.agreementLabels = oracles.ledger().totalLabels() - labelsBefore;

    SamplerFamily surrogate = [&oracles, &rule, &agreement](std::size_t i) {
        if (agreement[i].empty()) {
            const Point x = oracles.drawUnlabeled(i);
            return Example{x, oracles.queryLabel(i, x)};
        }
        return sampleSurrogate(oracles, i, rule, agreement[i]);
    };
    SolverConfig solver{eps / 2.0, delta / 6.0, nu, ctx.knobs};
    const std::uint64_t beforeSolver = oracles.ledger().totalLabels();
    auto hedge = mdlHedgeVc(cls, v0, k, surrogate, solver, ctx.vcDim, ctx.keepHedgeTrace);
    result.finalSolverLabels = oracles.ledger().totalLabels() - beforeSolver;
    if (ctx.keepHedgeTrace) result.hedgeTrace = std::move(hedge.trace);
    result.output = std::move(hedge.output);
    result.randomized = true;
    result.ledger = oracles.ledger();
    return result;
}

/// Routes by the exact nu: large-eps learner when eps >= 100 nu.
inline ActiveRunResult regimeDispatch(OracleSet& oracles, double eps, double delta, const LearnerContext& ctx) {
    const double nu = bestNu(oracles.instance()).nu;
    if (eps >= 100.0 * nu) return activeLargeEps(oracles, eps, delta, ctx);
    return activeSmallEps(oracles, eps, delta, nu, ctx);
}

} // namespace amdl
