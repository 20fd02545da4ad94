#pragma once
//
// MDL-Hedge-VC: a column player runs Hedge over the k distributions, the row
// player best-responds with a weighted ERM over a pooled, lazily grown sample
// store. The output is the uniform mixture of the played hypotheses.
//
// This one solver is also the passive subroutine of every active algorithm;
// they differ only in the sampler family they hand it.
//

#include "amdl/config.hpp"
#include "amdl/core.hpp"
#include "amdl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace amdl {

struct SolverConfig {
    double eps = 0.1;
    double delta = 0.1;
    double nu = 0.0;
    Knobs knobs{};

    void validate() const {
        require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
        require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
        require(nu >= 0.0 && nu < 1.0, "nu must lie in [0,1)");
        knobs.validate();
    }
};

struct HedgeParams {
    double eps1 = 0.0;
    double eta = 0.0;
    std::uint64_t rounds = 0;     // T
    std::uint64_t auxSamples = 0; // T1
};

inline std::uint64_t ceilCount(double value) {
    require(std::isfinite(value) && value > 0.0, "schedule produced a nonpositive size");
    require(value < 9.0e18, "schedule size overflows");
    return static_cast<std::uint64_t>(std::ceil(value));
}

/// Schedule of the refined analysis, each constant scaled by its knob. A VC
/// dimension of 0 drops the d-term (its logarithm is undefined there).
inline HedgeParams hyperparams(const SolverConfig& cfg, std::size_t k, std::size_t d) {
    cfg.validate();
    require(k >= 1, "need at least one distribution");
    const double kk = static_cast<double>(k);
    const double dd = static_cast<double>(d);
    HedgeParams p;
    p.eps1 = cfg.knobs.cEps1 * cfg.eps / 100.0;
    p.eta = cfg.knobs.cEta * p.eps1 / (100.0 * (p.eps1 + cfg.nu));
    const double scale = 1.0 / p.eps1 + cfg.nu / (p.eps1 * p.eps1);
    p.rounds = ceilCount(cfg.knobs.cT * 20000.0 * scale * std::log(kk / (cfg.delta * cfg.eps)));
    const double dTerm = d == 0 ? 0.0 : dd * std::log(kk * dd / cfg.eps);
    p.auxSamples = ceilCount(cfg.knobs.cT1 * 4000.0 * scale *
                             (kk * std::log(kk / cfg.eps) + dTerm + std::log(1.0 / cfg.delta)));
    require(p.eta > 0.0, "step size must be positive");
    return p;
}

/// Column-player state. Weights live in the log domain so long runs with a
/// large step size cannot overflow.
struct HedgeState {
    std::uint64_t round = 0;
    std::vector<double> logW;   // log W_i
    std::vector<double> w;      // normalized weights of the current round
    std::vector<double> wHat;   // doubled thresholds
    std::vector<double> wBar;   // running maxima
    std::vector<std::uint64_t> n; // stored samples per distribution

    explicit HedgeState(std::size_t k = 0)
        : logW(k, 0.0), w(k, k ? 1.0 / static_cast<double>(k) : 0.0), wHat(k, 0.0), wBar(k, 0.0), n(k, 0) {}

    void normalize() {
        const double top = *std::max_element(logW.begin(), logW.end());
        double total = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = std::exp(logW[i] - top);
            total += w[i];
        }
        for (double& v : w) v /= total;
    }
};

/// W_i <- W_i * exp(eta * r_i), then renormalize.
inline void hedgeStep(HedgeState& state, const std::vector<double>& rewards, double eta) {
    require(rewards.size() == state.logW.size(), "reward vector length mismatch");
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        require(rewards[i] >= 0.0 && rewards[i] <= 1.0, "rewards must lie in [0,1]");
        state.logW[i] += eta * rewards[i];
    }
    state.normalize();
}

/// Doubling rule: fires when some w_j >= 2 * wHat_j; then every threshold is
/// raised to max(w_i, wHat_i) and the store targets become ceil(T1 * wHat_i).
/// Returns the new store targets (unchanged when the rule does not fire).
inline bool applyDoubling(HedgeState& state, std::uint64_t auxSamples, std::vector<std::uint64_t>& targets) {
    bool fire = false;
    for (std::size_t j = 0; j < state.w.size(); ++j)
        if (state.w[j] >= 2.0 * state.wHat[j]) fire = true;
    targets = state.n;
    if (!fire) return false;
    for (std::size_t i = 0; i < state.w.size(); ++i) {
        state.wHat[i] = std::max(state.w[i], state.wHat[i]);
        targets[i] = std::max<std::uint64_t>(state.n[i], ceilCount(static_cast<double>(auxSamples) * state.wHat[i]));
    }
    return true;
}

/// Incrementally maintained error counts of every candidate on the first n_i
/// stored samples of each distribution.
class ErmStore {
public:
    ErmStore(const HypothesisClass& cls, VersionSpace candidates, std::size_t k)
        : cls_(&cls), candidates_(std::move(candidates)), samples_(k), errors_(k, std::vector<std::uint64_t>(candidates_.size(), 0)) {
        require(!candidates_.empty(), "ERM over an empty candidate set");
    }

    void add(std::size_t i, const Example& e) {
        samples_[i].push_back(e);
        auto& err = errors_[i];
        for (std::size_t c = 0; c < candidates_.size(); ++c)
            if ((*cls_)[candidates_[c]](e.x) != e.y) ++err[c];
    }

    std::size_t count(std::size_t i) const { return samples_[i].size(); }
    std::size_t total() const {
        std::size_t s = 0;
        for (const auto& v : samples_) s += v.size();
        return s;
    }
    const std::vector<Example>& samples(std::size_t i) const { return samples_[i]; }
    const VersionSpace& candidates() const noexcept { return candidates_; }

    /// argmin_h sum_i (w_i / n_i) * errors_i(h); ties to the lowest class index.
    std::size_t argmin(const std::vector<double>& w) const {
        std::size_t best = 0;
        double bestValue = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            double value = 0.0;
            for (std::size_t i = 0; i < samples_.size(); ++i) {
                if (w[i] == 0.0) continue;
                require(!samples_[i].empty(), "positive weight on a distribution with no stored samples");
                value += w[i] / static_cast<double>(samples_[i].size()) * static_cast<double>(errors_[i][c]);
            }
            if (value < bestValue) {
                bestValue = value;
                best = c;
            }
        }
        return candidates_[best];
    }

private:
    const HypothesisClass* cls_;
    VersionSpace candidates_;
    std::vector<std::vector<Example>> samples_;
    std::vector<std::vector<std::uint64_t>> errors_;
};

/// Weighted ERM on the first n_i samples of each distribution's store.
inline std::size_t weightedErm(const HypothesisClass& cls, const VersionSpace& candidates,
                               const std::vector<std::vector<Example>>& store, const std::vector<double>& w,
                               const std::vector<std::size_t>& n) {
    require(store.size() == w.size() && n.size() == w.size(), "store, weight and count lengths differ");
    ErmStore erm(cls, candidates, w.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        require(w[i] == 0.0 || n[i] >= 1, "positive weight needs at least one sample");
        require(n[i] <= store[i].size(), "count exceeds stored samples");
        for (std::size_t j = 0; j < n[i]; ++j) erm.add(i, store[i][j]);
    }
    return erm.argmin(w);
}

/// Empirical 0-1 loss of h on `count` fresh draws of distribution i.
inline double rewardEstimate(const Hypothesis& h, std::size_t i, std::uint64_t count, const SamplerFamily& sampler) {
    require(count >= 1, "reward estimate needs at least one draw");
    std::uint64_t errors = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
        const Example e = sampler(i);
        if (h(e.x) != e.y) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(count);
}

struct HedgeRoundTrace {
    std::uint64_t round = 0;
    std::size_t played = 0;
    double wBarNorm = 0.0;
    std::uint64_t storeSize = 0;
    std::uint64_t rewardDraws = 0;
    std::vector<double> w;
};

struct HedgeResult {
    RandomizedHypothesis output;
    HedgeParams params;
    std::uint64_t storeDraws = 0;
    std::uint64_t rewardDraws = 0;
    std::vector<HedgeRoundTrace> trace; // filled only when requested
};

/// Runs the full Hedge loop over `candidates` with samples from `sampler`.
inline HedgeResult mdlHedgeVc(const HypothesisClass& cls, const VersionSpace& candidates, std::size_t k,
                              const SamplerFamily& sampler, const SolverConfig& cfg, std::size_t vcDim,
                              bool keepTrace = false) {
    HedgeResult result;
    result.params = hyperparams(cfg, k, vcDim);
    const auto& p = result.params;

    HedgeState state(k);
    ErmStore store(cls, candidates, k);
    std::vector<std::uint64_t> targets;
    result.output.support.reserve(p.rounds);

    for (std::uint64_t t = 1; t <= p.rounds; ++t) {
        state.round = t;
        state.normalize();
        if (applyDoubling(state, p.auxSamples, targets)) {
            for (std::size_t i = 0; i < k; ++i) {
                while (state.n[i] < targets[i]) {
                    store.add(i, sampler(i));
                    ++state.n[i];
                    ++result.storeDraws;
                }
            }
        }
        const std::size_t played = store.argmin(state.w);
        result.output.support.push_back(played);

        std::vector<double> rewards(k);
        std::uint64_t drawsThisRound = 0;
        for (std::size_t i = 0; i < k; ++i) {
            state.wBar[i] = std::max(state.wBar[i], state.w[i]);
            const std::uint64_t count = ceilCount(static_cast<double>(k) * state.wBar[i]);
            rewards[i] = rewardEstimate(cls[played], i, count, sampler);
            drawsThisRound += count;
        }
        result.rewardDraws += drawsThisRound;

        if (keepTrace) {
            double norm = 0.0;
            for (double v : state.wBar) norm += v;
            result.trace.push_back({t, played, norm, store.total(), drawsThisRound, state.w});
        }
        hedgeStep(state, rewards, p.eta);
    }
    return result;
}

struct NaiveResult {
    std::size_t output = 0;
    std::uint64_t perDistribution = 0;
};

/// Per-distribution sample size of the naive baseline:
/// ceil(cNaive * (d ln(1/eps) + ln(k/delta)) * (nu + eps) / eps^2).
inline std::uint64_t naiveSampleSize(const SolverConfig& cfg, std::size_t k, std::size_t d) {
    cfg.validate();
    const double logs = static_cast<double>(d) * std::log(1.0 / cfg.eps) + std::log(static_cast<double>(k) / cfg.delta);
    return ceilCount(cfg.knobs.cNaive * std::max(logs, 1.0) * (cfg.nu + cfg.eps) / (cfg.eps * cfg.eps));
}

/// Draws the same number of labeled examples from every distribution and
/// returns the minimizer of the maximum empirical error (ties to lowest index).
inline NaiveResult naiveErmBaseline(const HypothesisClass& cls, std::size_t k, const SamplerFamily& sampler,
                                    const SolverConfig& cfg, std::size_t vcDim) {
    NaiveResult result;
    result.perDistribution = naiveSampleSize(cfg, k, vcDim);
    std::vector<std::vector<std::uint64_t>> errors(k, std::vector<std::uint64_t>(cls.size(), 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t j = 0; j < result.perDistribution; ++j) {
            const Example e = sampler(i);
            for (std::size_t h = 0; h < cls.size(); ++h)
                if (cls[h](e.x) != e.y) ++errors[i][h];
        }
    }
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t h = 0; h < cls.size(); ++h) {
        std::uint64_t worst = 0;
        for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, errors[i][h]);
        if (worst < best) {
            best = worst;
            result.output = h;
        }
    }
    return result;
}

} // namespace amdl
