#pragma once
//
// Metered oracle access. Unlabeled draws are free (but counted); every label
// query goes through queryLabel and is charged to its distribution. The
// samplers below realize the induced, imputed and surrogate distributions
// while paying labels only where the learner cannot impute.
//

#include "amdl/core.hpp"
#include "amdl/rng.hpp"

#include <functional>
#include <vector>

namespace amdl {

struct Example {
    Point x = 0;
    Label y = kPositive;
};

struct TranscriptEntry {
    std::size_t distribution = 0;
    Point x = 0;
    Label y = kPositive;
    std::uint64_t cumulativeLabels = 0;
};

class QueryLedger {
public:
    explicit QueryLedger(std::size_t k = 0, bool logTranscript = false)
        : labels_(k, 0), unlabeled_(k, 0), logging_(logTranscript) {}

    void chargeLabel(std::size_t i, Point x, Label y) {
        ++labels_[i];
        ++totalLabels_;
        if (logging_) transcript_.push_back({i, x, y, totalLabels_});
    }
    void chargeUnlabeled(std::size_t i) { ++unlabeled_[i]; }

    std::size_t k() const noexcept { return labels_.size(); }
    std::uint64_t labels(std::size_t i) const { return labels_[i]; }
    std::uint64_t unlabeled(std::size_t i) const { return unlabeled_[i]; }
    const std::vector<std::uint64_t>& labelsPerDistribution() const noexcept { return labels_; }
    std::uint64_t totalLabels() const noexcept { return totalLabels_; }
    std::uint64_t totalUnlabeled() const noexcept {
        std::uint64_t s = 0;
        for (auto u : unlabeled_) s += u;
        return s;
    }
    bool logging() const noexcept { return logging_; }
    const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

private:
    std::vector<std::uint64_t> labels_;
    std::vector<std::uint64_t> unlabeled_;
    std::uint64_t totalLabels_ = 0;
    bool logging_ = false;
    std::vector<TranscriptEntry> transcript_;
};

/// EX_i and O_i for every distribution of one instance, plus the learner's
/// own random stream. Confined to a single run.
class OracleSet {
public:
    OracleSet(const Instance& inst, std::uint64_t seed, bool logTranscript = false)
        : inst_(&inst), ledger_(inst.k(), logTranscript), learner_(streamSeed(seed, inst.k())) {
        streams_.reserve(inst.k());
        samplers_.reserve(inst.k());
        for (std::size_t i = 0; i < inst.k(); ++i) {
            streams_.emplace_back(streamSeed(seed, i));
            samplers_.emplace_back(inst.distribution(i).marginal());
        }
    }

    const Instance& instance() const noexcept { return *inst_; }
    std::size_t k() const noexcept { return inst_->k(); }

    Point drawUnlabeled(std::size_t i) {
        require(i < k(), "distribution index out of range");
        ledger_.chargeUnlabeled(i);
        return samplers_[i](streams_[i]);
    }

    Label queryLabel(std::size_t i, Point x) {
        require(i < k(), "distribution index out of range");
        require(x < inst_->domainSize(), "query point out of range");
        const Label y = streams_[i].bernoulli(inst_->distribution(i).eta(x)) ? kPositive : kNegative;
        ledger_.chargeLabel(i, x, y);
        return y;
    }

    /// A fresh labeled example from D_i (one unlabeled draw, one label).
    Example drawLabeled(std::size_t i) {
        const Point x = drawUnlabeled(i);
        return {x, queryLabel(i, x)};
    }

    RandomStream& learnerStream() noexcept { return learner_; }
    const QueryLedger& ledger() const noexcept { return ledger_; }

private:
    const Instance* inst_;
    QueryLedger ledger_;
    std::vector<RandomStream> streams_;
    std::vector<DiscreteSampler> samplers_;
    RandomStream learner_;
};

/// Draws one example from "distribution i" of whatever family a learner is
/// working on; the family decides how labels are obtained.
using SamplerFamily = std::function<Example(std::size_t)>;

/// Precomputed agreement structure of a version space or abstaining
/// classifier: lookup of V(x), 0 on DIS(V).
class ImputationRule {
public:
    ImputationRule() = default;
    explicit ImputationRule(AbstainingClassifier rule) : rule_(std::move(rule)) {}
    ImputationRule(const HypothesisClass& cls, const VersionSpace& v) : rule_(agreementClassifier(cls, v)) {}

    bool mustQuery(Point x) const { return rule_.abstains(x); }
    Label imputed(Point x) const { return rule_(x); }
    const AbstainingClassifier& classifier() const noexcept { return rule_; }

private:
    AbstainingClassifier rule_;
};

/// Induced distribution D_{i,n}: label queried on DIS(V), imputed as V(x) on AGR(V).
inline Example sampleInduced(OracleSet& oracles, std::size_t i, const ImputationRule& rule) {
    const Point x = oracles.drawUnlabeled(i);
    if (rule.mustQuery(x)) return {x, oracles.queryLabel(i, x)};
    return {x, rule.imputed(x)};
}

inline Example sampleInduced(OracleSet& oracles, std::size_t i, const HypothesisClass& cls, const VersionSpace& v) {
    require(!v.empty(), "induced sampling needs a non-empty version space");
    return sampleInduced(oracles, i, ImputationRule(cls, v));
}

/// Imputed distribution of the distribution-free scheme: query where f
/// abstains, otherwise take f(x).
inline Example sampleImputed(OracleSet& oracles, std::size_t i, const AbstainingClassifier& f) {
    const Point x = oracles.drawUnlabeled(i);
    if (f.abstains(x)) return {x, oracles.queryLabel(i, x)};
    return {x, f(x)};
}

/// Surrogate D'_i: fresh labeled draw on DIS(V0); when x lands in AGR(V0) it is
/// discarded and a uniform element of the pre-labeled sample is returned.
inline Example sampleSurrogate(OracleSet& oracles, std::size_t i, const ImputationRule& v0,
                               const std::vector<Example>& agreementSample) {
    require(!agreementSample.empty(), "surrogate sampling needs a non-empty agreement sample");
    const Point x = oracles.drawUnlabeled(i);
    if (v0.mustQuery(x)) return {x, oracles.queryLabel(i, x)};
    return agreementSample[oracles.learnerStream().index(agreementSample.size())];
}

/// n labeled draws from D_i conditioned on AGR(V0), by rejection from the
/// marginal. Rejected draws cost nothing but an unlabeled draw.
inline std::vector<Example> sampleConditionalAgreement(OracleSet& oracles, std::size_t i, const ImputationRule& v0,
                                                       std::size_t n) {
    const auto& d = oracles.instance().distribution(i);
    const double agreementMass = d.massWhere([&](Point x) { return !v0.mustQuery(x); });
    if (!(agreementMass > 0.0)) throw degenerate_agreement("agreement region has zero mass under distribution " + std::to_string(i));
    std::vector<Example> out;
    out.reserve(n);
    while (out.size() < n) {
        const Point x = oracles.drawUnlabeled(i);
        if (v0.mustQuery(x)) continue;
        out.push_back({x, oracles.queryLabel(i, x)});
    }
    return out;
}

inline SamplerFamily plainSampler(OracleSet& oracles) {
    return [&oracles](std::size_t i) { return oracles.drawLabeled(i); };
}

inline SamplerFamily inducedSampler(OracleSet& oracles, const ImputationRule& rule) {
    return [&oracles, rule](std::size_t i) { return sampleInduced(oracles, i, rule); };
}

} // namespace amdl
