#pragma once
//
// Exact complexity parameters of a finite class: VC dimension, star number
// and the disagreement coefficient of a fixed distribution.
//

#include "amdl/core.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

namespace amdl {

struct VcResult {
    std::size_t value = 0;
    bool atLeast = false; // the cap was reached with every size up to it shattered
};

namespace detail {

// Bitset over hypothesis indices; the star search works on these.
class HypothesisBits {
public:
    HypothesisBits() = default;
    explicit HypothesisBits(std::size_t n) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    HypothesisBits minus(const HypothesisBits& other) const {
        HypothesisBits out = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= ~other.words_[i];
        return out;
    }

    void unite(const HypothesisBits& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    }

    std::optional<std::size_t> first() const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return i * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[i]));
        return std::nullopt;
    }

private:
    std::vector<std::uint64_t> words_;
};

struct PatternHash {
    std::size_t operator()(const std::vector<Label>& v) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (Label y : v) h = (h ^ static_cast<std::size_t>(y + 1)) * 1099511628211ULL;
        return h;
    }
};

inline bool shatters(const HypothesisClass& cls, const std::vector<Point>& points) {
    if (points.size() >= 63) return false;
    const std::size_t needed = std::size_t{1} << points.size();
    if (cls.size() < needed) return false;
    std::unordered_set<std::vector<Label>, PatternHash> patterns;
    std::vector<Label> buf(points.size());
    for (const auto& h : cls) {
        for (std::size_t j = 0; j < points.size(); ++j) buf[j] = h(points[j]);
        patterns.insert(buf);
        if (patterns.size() == needed) return true;
    }
    return false;
}

} // namespace detail

/// Largest s <= cap such that some s-point subset is shattered. Shattering is
/// hereditary, so candidates of size s are built only from shattered sets of
/// size s-1, and the search stops at the first size with none.
inline VcResult vcDimension(const HypothesisClass& cls, std::size_t cap = 12) {
    const std::size_t m = cls.domainSize();
    std::vector<std::vector<Point>> level{{}};
    std::size_t size = 0;
    while (size < cap && size < m) {
        std::vector<std::vector<Point>> next;
        for (const auto& base : level) {
            const Point start = base.empty() ? 0 : base.back() + 1;
            for (Point x = start; x < m; ++x) {
                auto candidate = base;
                candidate.push_back(x);
                if (detail::shatters(cls, candidate)) next.push_back(std::move(candidate));
            }
        }
        if (next.empty()) return {size, false};
        level = std::move(next);
        ++size;
    }
    // Either every point is shattered together (size == m, exact) or the cap bound.
    return {size, size == cap && size < m};
}

struct StarResult {
    std::size_t value = 0;
    bool lowerBoundOnly = false;
    std::vector<Point> witness;     // the star set found
    std::vector<std::size_t> flips; // a hypothesis index flipping each witness point alone
    std::size_t nodes = 0;
};

/// Star number of the class relative to `reference` (which need not belong
/// to the class). Branch-and-bound over point sets in index order; when the
/// node budget runs out the best set found so far is returned as a lower bound.
inline StarResult starNumber(const HypothesisClass& cls, const Hypothesis& reference,
                             std::size_t nodeBudget = 2'000'000) {
    require(reference.size() == cls.domainSize(), "reference hypothesis dimension mismatch");
    const std::size_t m = cls.domainSize();
    const std::size_t n = cls.size();

    // flippers[x] = hypotheses that differ from the reference at x.
    std::vector<detail::HypothesisBits> flippers(m, detail::HypothesisBits(n));
    std::vector<Point> candidates;
    for (Point x = 0; x < m; ++x) {
        bool any = false;
        for (std::size_t h = 0; h < n; ++h) {
            if (cls[h](x) != reference(x)) {
                flippers[x].set(h);
                any = true;
            }
        }
        if (any) candidates.push_back(x);
    }

    StarResult best;
    std::vector<Point> chosen;
    std::vector<detail::HypothesisBits> witnesses;
    bool exhausted = false;

    auto record = [&] {
        if (chosen.size() <= best.value) return;
        best.value = chosen.size();
        best.witness = chosen;
        best.flips.clear();
        for (const auto& w : witnesses) best.flips.push_back(*w.first());
    };

    // Recursive search; `used` is the union of flippers over chosen points.
    auto dfs = [&](auto&& self, std::size_t from, const detail::HypothesisBits& used) -> void {
        if (exhausted) return;
        if (++best.nodes > nodeBudget) {
            exhausted = true;
            return;
        }
        record();
        if (chosen.size() + (candidates.size() - from) <= best.value) return;
        for (std::size_t c = from; c < candidates.size(); ++c) {
            if (chosen.size() + (candidates.size() - c) <= best.value) return;
            const Point y = candidates[c];
            auto own = flippers[y].minus(used);
            if (!own.any()) continue;
            std::vector<detail::HypothesisBits> next;
            next.reserve(witnesses.size() + 1);
            bool ok = true;
            for (const auto& w : witnesses) {
                next.push_back(w.minus(flippers[y]));
                if (!next.back().any()) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            next.push_back(std::move(own));
            auto saved = std::move(witnesses);
            witnesses = std::move(next);
            chosen.push_back(y);
            auto nextUsed = used;
            nextUsed.unite(flippers[y]);
            self(self, c + 1, nextUsed);
            chosen.pop_back();
            witnesses = std::move(saved);
            if (exhausted) return;
        }
    };
    dfs(dfs, 0, detail::HypothesisBits(n));

    if (exhausted) {
        // Greedy completion in index order as an additional lower bound.
        chosen.clear();
        witnesses.clear();
        detail::HypothesisBits used(n);
        for (Point y : candidates) {
            auto own = flippers[y].minus(used);
            if (!own.any()) continue;
            std::vector<detail::HypothesisBits> next;
            bool ok = true;
            for (const auto& w : witnesses) {
                next.push_back(w.minus(flippers[y]));
                if (!next.back().any()) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            next.push_back(std::move(own));
            witnesses = std::move(next);
            chosen.push_back(y);
            used.unite(flippers[y]);
        }
        record();
        best.lowerBoundOnly = true;
    }
    return best;
}

/// Unqualified star number: maximum over references drawn from the class.
inline StarResult starNumber(const HypothesisClass& cls, std::size_t nodeBudget = 2'000'000) {
    StarResult best;
    bool partial = false;
    for (const auto& h : cls) {
        auto r = starNumber(cls, h, nodeBudget);
        partial = partial || r.lowerBoundOnly;
        if (r.value > best.value || best.witness.empty()) {
            const auto nodes = best.nodes + r.nodes;
            best = std::move(r);
            best.nodes = nodes;
        } else {
            best.nodes += r.nodes;
        }
    }
    best.lowerBoundOnly = partial;
    return best;
}

/// Candidate radii rho_D(h*, h) and the DIS mass of the closed ball at each.
template <class Real = double>
struct DisagreementProfile {
    std::vector<Real> radii;  // strictly increasing
    std::vector<Real> masses; // Pr_D[DIS(B(h*, radius))], non-decreasing
};

template <class Real>
DisagreementProfile<Real> disagreementProfile(const BasicLabeledDistribution<Real>& d, const HypothesisClass& cls,
                                              const Hypothesis& reference) {
    require(reference.size() == cls.domainSize(), "reference hypothesis dimension mismatch");
    std::vector<Real> dist(cls.size());
    for (std::size_t h = 0; h < cls.size(); ++h) dist[h] = disagreement(reference, cls[h], d);
    DisagreementProfile<Real> profile;
    profile.radii = dist;
    std::sort(profile.radii.begin(), profile.radii.end());
    profile.radii.erase(std::unique(profile.radii.begin(), profile.radii.end()), profile.radii.end());
    for (const Real& r : profile.radii) {
        VersionSpace ball;
        for (std::size_t h = 0; h < cls.size(); ++h)
            if (dist[h] <= r) ball.push_back(h);
        profile.masses.push_back(disagreementMass(cls, ball, d));
    }
    return profile;
}

/// theta_{D,H,h*}(r0) = sup_{r >= r0} Pr[DIS(B(h*, r))] / r, evaluated at r0
/// and at every candidate radius >= r0 (the numerator is a right-continuous
/// step function, so the sup sits at one of those points).
template <class Real>
Real disagreementCoefficient(const BasicLabeledDistribution<Real>& d, const HypothesisClass& cls,
                             const Hypothesis& reference, const Real& r0) {
    require(r0 > Real(0), "disagreement coefficient needs r0 > 0");
    const auto profile = disagreementProfile(d, cls, reference);

    auto massAt = [&](const Real& r) {
        Real mass(0);
        for (std::size_t j = 0; j < profile.radii.size() && profile.radii[j] <= r; ++j) mass = profile.masses[j];
        return mass;
    };

    Real theta = massAt(r0) / r0;
    for (std::size_t j = 0; j < profile.radii.size(); ++j) {
        if (profile.radii[j] < r0) continue;
        const Real ratio = profile.masses[j] / profile.radii[j];
        if (ratio > theta) theta = ratio;
    }
    require(theta * r0 <= Real(1) + pmfTolerance<Real>(), "disagreement coefficient exceeds 1/r0");
    return theta;
}

template <class Real>
Real thetaMax(const BasicInstance<Real>& inst, const Hypothesis& reference, const Real& r0) {
    Real best = disagreementCoefficient(inst.distribution(0), inst.hypotheses(), reference, r0);
    for (std::size_t i = 1; i < inst.k(); ++i)
        best = std::max(best, disagreementCoefficient(inst.distribution(i), inst.hypotheses(), reference, r0));
    return best;
}

} // namespace amdl
