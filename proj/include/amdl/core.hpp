#pragma once
//
// Finite-support domain types and exact error / disagreement metrics.
//
// Feature points are indices 0..m-1, labels are -1/+1. A distribution over
// X x {-1,+1} is stored factorized as a marginal pmf plus the per-point
// probability of label +1. Everything here is templated on the scalar used
// for probabilities so the same code runs on doubles and on exact rationals.
//

#include "amdl/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace amdl {

using Point = std::size_t;
using Label = std::int8_t;

inline constexpr Label kPositive = 1;
inline constexpr Label kNegative = -1;
inline constexpr Label kAbstain = 0;

/// A total labeling of the feature space.
class Hypothesis {
public:
    Hypothesis() = default;

    explicit Hypothesis(std::vector<Label> labels) : labels_(std::move(labels)) {
        require(!labels_.empty(), "hypothesis over an empty feature space");
        for (Label y : labels_) require(y == kPositive || y == kNegative, "hypothesis labels must be -1 or +1");
    }

    static Hypothesis constant(std::size_t m, Label y) { return Hypothesis(std::vector<Label>(m, y)); }

    Label operator()(Point x) const { return labels_[x]; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::span<const Label> labels() const noexcept { return labels_; }

    Hypothesis flipped(Point x) const {
        require(x < labels_.size(), "flip point out of range");
        Hypothesis h = *this;
        h.labels_[x] = static_cast<Label>(-h.labels_[x]);
        return h;
    }

    Hypothesis complement() const {
        Hypothesis h = *this;
        for (auto& y : h.labels_) y = static_cast<Label>(-y);
        return h;
    }

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
    friend auto operator<=>(const Hypothesis&, const Hypothesis&) = default;

private:
    std::vector<Label> labels_;
};

/// Ordered list of distinct hypotheses over a common feature space. The order
/// is the canonical tie-break order used by every argmin in the library.
class HypothesisClass {
public:
    explicit HypothesisClass(std::vector<Hypothesis> hypotheses) : hypotheses_(std::move(hypotheses)) {
        require(!hypotheses_.empty(), "hypothesis class must be non-empty");
        const std::size_t m = hypotheses_.front().size();
        std::set<Hypothesis> seen;
        for (const auto& h : hypotheses_) {
            require(h.size() == m, "hypotheses must share the feature space");
            require(seen.insert(h).second, "duplicate hypothesis in class");
        }
    }

    std::size_t size() const noexcept { return hypotheses_.size(); }
    std::size_t domainSize() const noexcept { return hypotheses_.front().size(); }
    const Hypothesis& operator[](std::size_t index) const { return hypotheses_[index]; }
    auto begin() const noexcept { return hypotheses_.begin(); }
    auto end() const noexcept { return hypotheses_.end(); }

    std::optional<std::size_t> indexOf(const Hypothesis& h) const {
        auto it = std::find(hypotheses_.begin(), hypotheses_.end(), h);
        if (it == hypotheses_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - hypotheses_.begin());
    }

private:
    std::vector<Hypothesis> hypotheses_;
};

/// Sorted set of indices into a HypothesisClass.
using VersionSpace = std::vector<std::size_t>;

inline VersionSpace fullVersionSpace(const HypothesisClass& cls) {
    VersionSpace v(cls.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
    return v;
}

inline bool isSubset(const VersionSpace& inner, const VersionSpace& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

/// Uniform mixture over played hypotheses (duplicates allowed). Losses and
/// disagreements are arithmetic means over the support.
struct RandomizedHypothesis {
    std::vector<std::size_t> support;

    static RandomizedHypothesis pure(std::size_t index) { return {{index}}; }

    /// Fraction of the support predicting +1 at each point.
    template <class Real = double>
    std::vector<Real> plusFraction(const HypothesisClass& cls) const {
        require(!support.empty(), "randomized hypothesis with empty support");
        std::vector<std::size_t> counts(cls.domainSize(), 0);
        for (std::size_t idx : support) {
            require(idx < cls.size(), "support index out of range");
            const auto& h = cls[idx];
            for (Point x = 0; x < counts.size(); ++x)
                if (h(x) == kPositive) ++counts[x];
        }
        std::vector<Real> out(counts.size());
        const Real total = Real(static_cast<long long>(support.size()));
        for (std::size_t x = 0; x < counts.size(); ++x) out[x] = Real(static_cast<long long>(counts[x])) / total;
        return out;
    }
};

/// A map X -> {-1, 0, +1}; 0 means abstain.
class AbstainingClassifier {
public:
    AbstainingClassifier() = default;

    explicit AbstainingClassifier(std::vector<Label> outputs) : outputs_(std::move(outputs)) {
        for (Label y : outputs_) require(y >= -1 && y <= 1, "abstaining classifier outputs must be in {-1,0,+1}");
    }

    static AbstainingClassifier alwaysAbstain(std::size_t m) { return AbstainingClassifier(std::vector<Label>(m, kAbstain)); }

    Label operator()(Point x) const { return outputs_[x]; }
    bool abstains(Point x) const { return outputs_[x] == kAbstain; }
    std::size_t size() const noexcept { return outputs_.size(); }
    std::span<const Label> outputs() const noexcept { return outputs_; }

    friend bool operator==(const AbstainingClassifier&, const AbstainingClassifier&) = default;

private:
    std::vector<Label> outputs_;
};

template <class Real>
inline Real pmfTolerance() {
    return Real(1) / Real(1'000'000'000'000LL);
}

/// Finite distribution over X x {-1,+1}: marginal pmf plus Pr(y=+1 | x).
template <class Real = double>
class BasicLabeledDistribution {
public:
    BasicLabeledDistribution() = default;

    BasicLabeledDistribution(std::vector<Real> marginal, std::vector<Real> etaPlus)
        : marginal_(std::move(marginal)), etaPlus_(std::move(etaPlus)) {
        require(!marginal_.empty(), "distribution over an empty feature space");
        require(marginal_.size() == etaPlus_.size(), "marginal and eta_plus lengths differ");
        Real total(0);
        for (std::size_t x = 0; x < marginal_.size(); ++x) {
            require(marginal_[x] >= Real(0), "marginal entries must be non-negative");
            require(etaPlus_[x] >= Real(0) && etaPlus_[x] <= Real(1), "eta_plus entries must lie in [0,1]");
            total += marginal_[x];
        }
        const Real tol = pmfTolerance<Real>();
        require(total <= Real(1) + tol && total >= Real(1) - tol, "marginal must sum to 1");
    }

    std::size_t size() const noexcept { return marginal_.size(); }
    const Real& mass(Point x) const { return marginal_[x]; }
    const Real& eta(Point x) const { return etaPlus_[x]; }
    std::span<const Real> marginal() const noexcept { return marginal_; }
    std::span<const Real> etaPlus() const noexcept { return etaPlus_; }

    /// Joint probability D(x, y).
    Real joint(Point x, Label y) const {
        return y == kPositive ? marginal_[x] * etaPlus_[x] : marginal_[x] * (Real(1) - etaPlus_[x]);
    }

    /// Total marginal mass of a set of points.
    template <class Pred>
    Real massWhere(Pred&& pred) const {
        Real total(0);
        for (Point x = 0; x < marginal_.size(); ++x)
            if (pred(x)) total += marginal_[x];
        return total;
    }

private:
    std::vector<Real> marginal_;
    std::vector<Real> etaPlus_;
};

template <class Real>
class BasicInstance;

template <class Real>
struct BasicBestHypothesis {
    std::size_t index = 0;
    Real nu{};
};

template <class Real>
BasicBestHypothesis<Real> bestNu(const BasicInstance<Real>& inst);

/// k labeled distributions over a shared feature space plus a hypothesis class.
template <class Real = double>
class BasicInstance {
public:
    BasicInstance(HypothesisClass cls, std::vector<BasicLabeledDistribution<Real>> distributions,
                  std::optional<Real> declaredNu = std::nullopt)
        : class_(std::move(cls)), distributions_(std::move(distributions)), declaredNu_(std::move(declaredNu)) {
        require(!distributions_.empty(), "instance needs at least one distribution");
        for (const auto& d : distributions_)
            require(d.size() == class_.domainSize(), "distribution and hypothesis class disagree on feature space size");
        if (declaredNu_) {
            const Real computed = bestNu(*this).nu;
            const Real diff = computed > *declaredNu_ ? computed - *declaredNu_ : *declaredNu_ - computed;
            require(diff <= Real(1) / Real(1'000'000'000LL), "declared nu differs from the computed optimum");
        }
    }

    std::size_t domainSize() const noexcept { return class_.domainSize(); }
    std::size_t k() const noexcept { return distributions_.size(); }
    const HypothesisClass& hypotheses() const noexcept { return class_; }
    const BasicLabeledDistribution<Real>& distribution(std::size_t i) const {
        require(i < distributions_.size(), "distribution index out of range");
        return distributions_[i];
    }
    std::span<const BasicLabeledDistribution<Real>> distributions() const noexcept { return distributions_; }
    const std::optional<Real>& declaredNu() const noexcept { return declaredNu_; }

private:
    HypothesisClass class_;
    std::vector<BasicLabeledDistribution<Real>> distributions_;
    std::optional<Real> declaredNu_;
};

using LabeledDistribution = BasicLabeledDistribution<double>;
using Instance = BasicInstance<double>;
using BestHypothesis = BasicBestHypothesis<double>;

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// L(h, D) = sum_x D(x) * Pr(y != h(x) | x).
template <class Real>
Real loss(const Hypothesis& h, const BasicLabeledDistribution<Real>& d) {
    require(h.size() == d.size(), "hypothesis and distribution dimension mismatch");
    Real total(0);
    for (Point x = 0; x < d.size(); ++x)
        total += d.mass(x) * (h(x) == kNegative ? d.eta(x) : Real(1) - d.eta(x));
    return total;
}

/// Loss of a randomized predictor given its per-point probability of +1.
template <class Real>
Real softLoss(std::span<const Real> plus, const BasicLabeledDistribution<Real>& d) {
    require(plus.size() == d.size(), "predictor and distribution dimension mismatch");
    Real total(0);
    for (Point x = 0; x < d.size(); ++x)
        total += d.mass(x) * (plus[x] * (Real(1) - d.eta(x)) + (Real(1) - plus[x]) * d.eta(x));
    return total;
}

template <class Real>
Real loss(const RandomizedHypothesis& h, const HypothesisClass& cls, const BasicLabeledDistribution<Real>& d) {
    const auto plus = h.plusFraction<Real>(cls);
    return softLoss<Real>(plus, d);
}

/// max_i L(h, D_i).
template <class Real>
Real worstLoss(const Hypothesis& h, const BasicInstance<Real>& inst) {
    Real worst = loss(h, inst.distribution(0));
    for (std::size_t i = 1; i < inst.k(); ++i) worst = std::max(worst, loss(h, inst.distribution(i)));
    return worst;
}

template <class Real>
Real worstLoss(const RandomizedHypothesis& h, const BasicInstance<Real>& inst) {
    const auto plus = h.plusFraction<Real>(inst.hypotheses());
    Real worst = softLoss<Real>(plus, inst.distribution(0));
    for (std::size_t i = 1; i < inst.k(); ++i) worst = std::max(worst, softLoss<Real>(plus, inst.distribution(i)));
    return worst;
}

// ---------------------------------------------------------------------------
// Disagreement metrics
// ---------------------------------------------------------------------------

/// rho_D(h1, h2) = Pr_{x~D}[h1(x) != h2(x)].
template <class Real>
Real disagreement(const Hypothesis& a, const Hypothesis& b, const BasicLabeledDistribution<Real>& d) {
    require(a.size() == d.size() && b.size() == d.size(), "hypothesis and distribution dimension mismatch");
    Real total(0);
    for (Point x = 0; x < d.size(); ++x)
        if (a(x) != b(x)) total += d.mass(x);
    return total;
}

/// Mean disagreement over independent draws from two randomized predictors
/// given as per-point probabilities of +1.
template <class Real>
Real softDisagreement(std::span<const Real> a, std::span<const Real> b, const BasicLabeledDistribution<Real>& d) {
    require(a.size() == d.size() && b.size() == d.size(), "predictor and distribution dimension mismatch");
    Real total(0);
    for (Point x = 0; x < d.size(); ++x)
        total += d.mass(x) * (a[x] * (Real(1) - b[x]) + (Real(1) - a[x]) * b[x]);
    return total;
}

template <class Real>
std::vector<Real> indicatorPlus(const Hypothesis& h) {
    std::vector<Real> out(h.size());
    for (Point x = 0; x < h.size(); ++x) out[x] = h(x) == kPositive ? Real(1) : Real(0);
    return out;
}

template <class Real>
Real disagreement(const Hypothesis& a, const RandomizedHypothesis& b, const HypothesisClass& cls,
                  const BasicLabeledDistribution<Real>& d) {
    const auto pa = indicatorPlus<Real>(a);
    const auto pb = b.plusFraction<Real>(cls);
    return softDisagreement<Real>(pa, pb, d);
}

template <class Real>
Real disagreement(const RandomizedHypothesis& a, const RandomizedHypothesis& b, const HypothesisClass& cls,
                  const BasicLabeledDistribution<Real>& d) {
    const auto pa = a.plusFraction<Real>(cls);
    const auto pb = b.plusFraction<Real>(cls);
    return softDisagreement<Real>(pa, pb, d);
}

/// rho(h1, h2) = max_i rho_i(h1, h2).
template <class Real>
Real maxDisagreement(const Hypothesis& a, const Hypothesis& b, const BasicInstance<Real>& inst) {
    Real worst = disagreement(a, b, inst.distribution(0));
    for (std::size_t i = 1; i < inst.k(); ++i) worst = std::max(worst, disagreement(a, b, inst.distribution(i)));
    return worst;
}

/// rho(h, hbar) against a randomized center given by its +1 fractions.
template <class Real>
Real maxSoftDisagreement(const Hypothesis& a, std::span<const Real> centerPlus, const BasicInstance<Real>& inst) {
    const auto pa = indicatorPlus<Real>(a);
    Real worst = softDisagreement<Real>(pa, centerPlus, inst.distribution(0));
    for (std::size_t i = 1; i < inst.k(); ++i)
        worst = std::max(worst, softDisagreement<Real>(pa, centerPlus, inst.distribution(i)));
    return worst;
}

template <class Real>
Real maxDisagreement(const Hypothesis& a, const RandomizedHypothesis& b, const BasicInstance<Real>& inst) {
    const auto pb = b.plusFraction<Real>(inst.hypotheses());
    return maxSoftDisagreement<Real>(a, pb, inst);
}

// ---------------------------------------------------------------------------
// Disagreement / agreement regions
// ---------------------------------------------------------------------------

/// Unanimous label of V at every point, 0 where V disagrees. This is V(x) on
/// AGR(V) and marks DIS(V) as abstentions.
inline AbstainingClassifier agreementClassifier(const HypothesisClass& cls, const VersionSpace& v) {
    require(!v.empty(), "empty version space");
    std::vector<Label> out(cls.domainSize());
    const auto& first = cls[v.front()];
    for (Point x = 0; x < out.size(); ++x) {
        Label y = first(x);
        for (std::size_t idx : v) {
            if (cls[idx](x) != y) {
                y = kAbstain;
                break;
            }
        }
        out[x] = y;
    }
    return AbstainingClassifier(std::move(out));
}

/// DIS(V): points where two members of V disagree, ascending.
inline std::vector<Point> disagreementRegion(const HypothesisClass& cls, const VersionSpace& v) {
    const auto agree = agreementClassifier(cls, v);
    std::vector<Point> out;
    for (Point x = 0; x < agree.size(); ++x)
        if (agree.abstains(x)) out.push_back(x);
    return out;
}

/// Abstention mass Pr_D[f(x) = 0].
template <class Real>
Real abstentionMass(const AbstainingClassifier& f, const BasicLabeledDistribution<Real>& d) {
    require(f.size() == d.size(), "classifier and distribution dimension mismatch");
    return d.massWhere([&](Point x) { return f.abstains(x); });
}

/// Pr_D[x in DIS(V)].
template <class Real>
Real disagreementMass(const HypothesisClass& cls, const VersionSpace& v, const BasicLabeledDistribution<Real>& d) {
    return abstentionMass(agreementClassifier(cls, v), d);
}

// ---------------------------------------------------------------------------
// Optimum
// ---------------------------------------------------------------------------

/// Exact minimizer of worstLoss over the class; ties go to the lowest index.
template <class Real>
BasicBestHypothesis<Real> bestNu(const BasicInstance<Real>& inst) {
    const auto& cls = inst.hypotheses();
    BasicBestHypothesis<Real> best{0, worstLoss(cls[0], inst)};
    for (std::size_t h = 1; h < cls.size(); ++h) {
        Real value = worstLoss(cls[h], inst);
        if (value < best.nu) best = {h, value};
    }
    return best;
}

/// Uniform mixture (1/k) sum_i D_i, or the mixture over a subset of indices.
template <class Real>
BasicLabeledDistribution<Real> uniformMixture(const BasicInstance<Real>& inst, std::span<const std::size_t> members) {
    require(!members.empty(), "mixture over an empty set of distributions");
    const std::size_t m = inst.domainSize();
    const Real weight = Real(1) / Real(static_cast<long long>(members.size()));
    std::vector<Real> marginal(m, Real(0));
    std::vector<Real> positive(m, Real(0));
    for (std::size_t i : members) {
        const auto& d = inst.distribution(i);
        for (Point x = 0; x < m; ++x) {
            marginal[x] += weight * d.mass(x);
            positive[x] += weight * d.joint(x, kPositive);
        }
    }
    std::vector<Real> eta(m, Real(0));
    for (Point x = 0; x < m; ++x) {
        if (marginal[x] > Real(0)) {
            eta[x] = positive[x] / marginal[x];
            if (eta[x] > Real(1)) eta[x] = Real(1);
        }
    }
    return BasicLabeledDistribution<Real>(std::move(marginal), std::move(eta));
}

template <class Real>
BasicLabeledDistribution<Real> averageDistribution(const BasicInstance<Real>& inst) {
    std::vector<std::size_t> all(inst.k());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return uniformMixture(inst, std::span<const std::size_t>(all));
}

} // namespace amdl
