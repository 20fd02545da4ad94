#pragma once
//
// Reliable-and-probably-useful learning and the distribution-free active
// learner built on it.
//
// robustRpuLearn trains one abstaining classifier per batch (abstain on the
// disagreement region of the batch's consistent hypotheses) and combines them
// by a thresholded vote, which tolerates a minority of corrupted batches.
// passiveRpuMdl repeats that on the mixture of the distributions that are not
// yet covered, dropping each distribution once its abstention mass is small.
//

#include "amdl/active_dd.hpp"
#include "amdl/config.hpp"
#include "amdl/core.hpp"
#include "amdl/hedge.hpp"
#include "amdl/oracle.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace amdl {

/// Smallest n >= max(1, s) with (10 s ln(e n / s) + 4 ln 80) / n <= xi / 2,
/// the s-term being 0 when s = 0; then scaled by cN.
inline std::uint64_t rpuBatchSize(double xi, std::size_t star, double cN = 1.0) {
    require(xi > 0.0 && xi <= 1.0, "reliability target must lie in (0,1]");
    require(cN > 0.0, "batch-size knob must be positive");
    const double s = static_cast<double>(star);
    const double constant = 4.0 * std::log(80.0);
    auto fits = [&](std::uint64_t n) {
        const double nn = static_cast<double>(n);
        const double starTerm = star == 0 ? 0.0 : 10.0 * s * std::log(std::exp(1.0) * nn / s);
        return (starTerm + constant) / nn <= xi / 2.0;
    };
    std::uint64_t lo = std::max<std::uint64_t>(1, star);
    if (!fits(lo)) {
        std::uint64_t hi = lo * 2;
        while (!fits(hi)) {
            lo = hi;
            hi *= 2;
        }
        // invariant: fits(hi), !fits(lo)
        while (hi - lo > 1) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (fits(mid)) hi = mid;
            else lo = mid;
        }
        lo = hi;
    }
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(cN * static_cast<double>(lo))));
}

/// N = 60 * ceil(ln(1/delta)), scaled by cBatches, at least 1.
inline std::size_t rpuBatchCount(double delta, double cBatches = 1.0) {
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    const double base = 60.0 * std::ceil(std::log(1.0 / delta));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cBatches * base)));
}

/// Abstain when at most N/5 batches commit; otherwise the sign of the vote
/// sum, abstaining on an exact tie.
inline Label thresholdedMajority(const std::vector<Label>& votes) {
    std::size_t committed = 0;
    long sum = 0;
    for (Label v : votes) {
        if (v != kAbstain) ++committed;
        sum += v;
    }
    if (5 * committed <= votes.size()) return kAbstain;
    if (sum > 0) return kPositive;
    if (sum < 0) return kNegative;
    return kAbstain;
}

/// Classifier of one batch: abstain on DIS of the consistent set, or
/// everywhere when no hypothesis is consistent.
inline AbstainingClassifier batchClassifier(const HypothesisClass& cls, const std::vector<Example>& batch) {
    VersionSpace consistent;
    for (std::size_t h = 0; h < cls.size(); ++h) {
        bool ok = true;
        for (const auto& e : batch) {
            if (cls[h](e.x) != e.y) {
                ok = false;
                break;
            }
        }
        if (ok) consistent.push_back(h);
    }
    if (consistent.empty()) return AbstainingClassifier::alwaysAbstain(cls.domainSize());
    return agreementClassifier(cls, consistent);
}

struct RobustRpuResult {
    AbstainingClassifier classifier;
    std::size_t batches = 0;
    std::uint64_t batchSize = 0;
    std::size_t corruptedBatches = 0;
};

inline RobustRpuResult robustRpuLearn(const HypothesisClass& cls, const std::function<Example()>& sample, double xi,
                                      double delta, std::size_t star, const Knobs& knobs) {
    RobustRpuResult result;
    result.batches = rpuBatchCount(delta, knobs.cBatches);
    result.batchSize = rpuBatchSize(xi, star, knobs.cN);
    const std::size_t m = cls.domainSize();
    std::vector<std::vector<Label>> votes(m, std::vector<Label>(result.batches, kAbstain));
    std::vector<Example> batch;
    for (std::size_t b = 0; b < result.batches; ++b) {
        batch.clear();
        for (std::uint64_t j = 0; j < result.batchSize; ++j) batch.push_back(sample());
        const auto f = batchClassifier(cls, batch);
        bool corrupted = true;
        for (Point x = 0; x < m; ++x) {
            votes[x][b] = f(x);
            if (f(x) != kAbstain) corrupted = false;
        }
        if (corrupted) ++result.corruptedBatches;
    }
    std::vector<Label> out(m);
    for (Point x = 0; x < m; ++x) out[x] = thresholdedMajority(votes[x]);
    result.classifier = AbstainingClassifier(std::move(out));
    return result;
}

/// Reliability and usefulness of an abstaining classifier against a
/// reference labeling, per distribution, from exact masses.
struct RpuReport {
    std::vector<double> violationMass;
    std::vector<double> abstentionMass;
    std::size_t violatingPoints = 0; // points of positive mass anywhere with a wrong commitment
    std::uint64_t labels = 0;

    double maxAbstention() const {
        return abstentionMass.empty() ? 0.0 : *std::max_element(abstentionMass.begin(), abstentionMass.end());
    }
    bool reliable() const {
        for (double v : violationMass)
            if (v > 0.0) return false;
        return true;
    }
};

inline RpuReport rpuReport(const AbstainingClassifier& f, const Hypothesis& reference, const Instance& inst) {
    RpuReport report;
    for (std::size_t i = 0; i < inst.k(); ++i) {
        const auto& d = inst.distribution(i);
        report.violationMass.push_back(d.massWhere([&](Point x) { return !f.abstains(x) && f(x) != reference(x); }));
        report.abstentionMass.push_back(abstentionMass(f, d));
    }
    for (Point x = 0; x < f.size(); ++x) {
        if (f.abstains(x) || f(x) == reference(x)) continue;
        for (std::size_t i = 0; i < inst.k(); ++i) {
            if (inst.distribution(i).mass(x) > 0.0) {
                ++report.violatingPoints;
                break;
            }
        }
    }
    return report;
}

struct PassiveRpuResult {
    AbstainingClassifier classifier;
    std::size_t rounds = 0;
    FailureMode failure = FailureMode::none;
    std::vector<std::size_t> survivors; // |N_r| at the start of each round
};

inline std::size_t ceilLog2(std::size_t k) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < k) ++bits;
    return bits;
}

/// Covers the k distributions (sampled through `sampler`, masses read from
/// `inst`) one mixture at a time. The round cap guards against a pruning
/// step that fails to make progress.
inline PassiveRpuResult passiveRpuMdl(const Instance& inst, const SamplerFamily& sampler, RandomStream& learner,
                                      double xi, double delta, std::size_t star, const Knobs& knobs) {
    const auto& cls = inst.hypotheses();
    const std::size_t k = inst.k();
    const std::size_t logK = ceilLog2(k);
    const double callDelta = delta / static_cast<double>(2 * logK + 2);
    const std::size_t roundCap = 4 * logK + 4;

    PassiveRpuResult result;
    std::vector<std::size_t> alive(k);
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<AbstainingClassifier> learned;

    while (!alive.empty()) {
        if (result.rounds == roundCap) {
            result.failure = FailureMode::pruning_stalled;
            break;
        }
        ++result.rounds;
        result.survivors.push_back(alive.size());
        auto mixture = [&]() { return sampler(alive[learner.index(alive.size())]); };
        auto f = robustRpuLearn(cls, mixture, xi / 2.0, callDelta, star, knobs).classifier;
        std::vector<std::size_t> still;
        for (std::size_t i : alive)
            if (abstentionMass(f, inst.distribution(i)) > xi) still.push_back(i);
        alive = std::move(still);
        learned.push_back(std::move(f));
    }

    std::vector<Label> out(cls.domainSize(), kAbstain);
    for (Point x = 0; x < out.size(); ++x) {
        for (const auto& f : learned) {
            if (!f.abstains(x)) {
                out[x] = f(x);
                break;
            }
        }
    }
    result.classifier = AbstainingClassifier(std::move(out));
    return result;
}

/// Epochs n0 = max(1, ceil(log2((d + k) / (s eps)))), or 1 when s = 0.
inline std::size_t distFreeEpochs(std::size_t d, std::size_t k, std::size_t star, double eps) {
    if (star == 0) return 1;
    const double n = std::ceil(std::log2(static_cast<double>(d + k) / (static_cast<double>(star) * eps)));
    return n >= 1.0 ? static_cast<std::size_t>(n) : 1;
}

/// Distribution-free learner: refine an RPU classifier epoch by epoch on the
/// imputed distributions, then run the passive solver once, paying labels
/// only where the last classifier abstains.
inline ActiveRunResult activeDistFree(OracleSet& oracles, double eps, double delta, const LearnerContext& ctx) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    const Instance& inst = oracles.instance();
    const auto& cls = inst.hypotheses();
    const std::size_t k = inst.k();
    const double nu = bestNu(inst).nu;

    ActiveRunResult result;
    result.branch = "dist-free";
    if (eps < 100.0 * static_cast<double>(k + ctx.vcDim) * nu)
        result.warnings.push_back("target below 100*(k+d)*nu: outside the distribution-free regime");

    const std::size_t n0 = distFreeEpochs(ctx.vcDim, k, ctx.starNumber, eps);
    AbstainingClassifier f = AbstainingClassifier::alwaysAbstain(cls.domainSize());
    for (std::size_t n = 1; n <= n0; ++n) {
        const double epsN = EpochSchedule::epsAt(n);
        const double deltaN = EpochSchedule::deltaAt(delta, n);
        const std::uint64_t labelsBefore = oracles.ledger().totalLabels();
        SamplerFamily sampler = [&oracles, &f](std::size_t i) { return sampleImputed(oracles, i, f); };

        DfEpochTrace trace;
        trace.epoch = n;
        trace.epsN = epsN;
        if (n < n0) {
            if (nu > 0.0 && epsN < 100.0 * static_cast<double>(ctx.starNumber) * nu)
                result.warnings.push_back("epoch " + std::to_string(n) + ": reliability target below 100*s*nu");
            auto rpu = passiveRpuMdl(inst, sampler, oracles.learnerStream(), epsN, deltaN, ctx.starNumber, ctx.knobs);
            trace.roundsUsed = rpu.rounds;
            trace.labels = oracles.ledger().totalLabels() - labelsBefore;
            if (rpu.failure != FailureMode::none) {
                result.dfEpochs.push_back(trace);
                result.failure = rpu.failure;
                result.failureEpoch = n;
                result.ledger = oracles.ledger();
                return result;
            }
            f = std::move(rpu.classifier);
            for (std::size_t i = 0; i < k; ++i)
                trace.abstainMassMax = std::max(trace.abstainMassMax, abstentionMass(f, inst.distribution(i)));
            result.dfEpochs.push_back(trace);
            continue;
        }
        for (std::size_t i = 0; i < k; ++i)
            trace.abstainMassMax = std::max(trace.abstainMassMax, abstentionMass(f, inst.distribution(i)));
        const double target = ctx.knobs.dfFinalEpsN ? epsN : eps;
        SolverConfig solver{target, deltaN, nu, ctx.knobs};
        auto hedge = mdlHedgeVc(cls, fullVersionSpace(cls), k, sampler, solver, ctx.vcDim, ctx.keepHedgeTrace);
        trace.labels = oracles.ledger().totalLabels() - labelsBefore;
        result.finalSolverLabels = trace.labels;
        result.dfEpochs.push_back(trace);
        if (ctx.keepHedgeTrace) result.hedgeTrace = std::move(hedge.trace);
        result.output = std::move(hedge.output);
        result.randomized = true;
    }
    result.rpuClassifier = f;
    result.ledger = oracles.ledger();
    return result;
}

} // namespace amdl
