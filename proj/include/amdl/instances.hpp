#pragma once
//
// The constructed instance families: the adversarial example where averaging
// the distributions inflates the disagreement coefficient, the star-number
// lower-bound family, the agnostic lower-bound family and the two-case
// small-eps example. All generators are exact in any Real type.
//

#include "amdl/core.hpp"
#include "amdl/rng.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace amdl {

/// X = {x0, x1..xk}; H = {all -1, and each single flip of x_i}; D_i puts
/// 1-eps on (x0,-1) and eps on (x_i,+1).
template <class Real = double>
BasicInstance<Real> genProp1(std::size_t k, const Real& eps) {
    require(k >= 1, "prop1 needs k >= 1");
    require(eps > Real(0) && eps < Real(1), "prop1 needs eps in (0,1)");
    const std::size_t m = k + 1;
    std::vector<Hypothesis> hs{Hypothesis::constant(m, kNegative)};
    for (std::size_t i = 1; i <= k; ++i) hs.push_back(hs.front().flipped(i));
    std::vector<BasicLabeledDistribution<Real>> ds;
    for (std::size_t i = 1; i <= k; ++i) {
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        marginal[0] = Real(1) - eps;
        marginal[i] = eps;
        eta[i] = Real(1);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    return BasicInstance<Real>(HypothesisClass(std::move(hs)), std::move(ds));
}

/// Star lower-bound family: k blocks of theta points; h0 = all -1 and h_l
/// flips point l-1. D_b is uniform on block b and labeled by h0, except block
/// i (1-based) when j >= 1, which is labeled by h_{(i-1) theta + j}.
template <class Real = double>
BasicInstance<Real> genStarLb(std::size_t k, std::size_t theta, std::size_t i, std::size_t j) {
    require(k >= 1 && theta >= 1, "star-lb needs k >= 1 and theta >= 1");
    require(i >= 1 && i <= k, "star-lb block index must lie in [1,k]");
    require(j <= theta, "star-lb flip index must lie in [0,theta]");
    const std::size_t m = k * theta;
    std::vector<Hypothesis> hs{Hypothesis::constant(m, kNegative)};
    for (std::size_t l = 1; l <= m; ++l) hs.push_back(hs.front().flipped(l - 1));
    std::vector<BasicLabeledDistribution<Real>> ds;
    const Real share = Real(1) / Real(static_cast<long long>(theta));
    for (std::size_t b = 0; b < k; ++b) {
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        for (std::size_t p = b * theta; p < (b + 1) * theta; ++p) marginal[p] = share;
        if (b + 1 == i && j >= 1) eta[(i - 1) * theta + j - 1] = Real(1);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    return BasicInstance<Real>(HypothesisClass(std::move(hs)), std::move(ds));
}

/// Agnostic lower-bound family. Points x1 = 0, x2 = 1, z_i = 1 + i.
/// h1 = all +1; h2 = -1 on x1, x2 and +1 on every z. D1 = nu*(x1) + (1-nu)*(z1),
/// D_i = nu/2*(x2) + (1-nu/2)*(z_i) for i >= 2, with Pr(y=-1 | z_i) =
/// (nu - 4 eps)/(2 - nu), or (nu + 4 eps)/(2 - nu) for the flipped index.
template <class Real = double>
BasicInstance<Real> genAgnosticLb(std::size_t k, const Real& nu, const Real& eps,
                                  std::optional<std::size_t> flipped = std::nullopt) {
    require(k >= 2, "agnostic-lb needs k >= 2");
    require(eps > Real(0), "agnostic-lb needs eps > 0");
    require(nu >= Real(8) * eps && nu <= Real(1) / Real(2), "agnostic-lb needs 8 eps <= nu <= 1/2");
    require(!flipped || (*flipped >= 2 && *flipped <= k), "flipped index must lie in [2,k]");
    const std::size_t m = k + 2;
    const Point x1 = 0, x2 = 1;
    auto z = [](std::size_t i) -> Point { return 1 + i; };

    std::vector<Label> h2(m, kPositive);
    h2[x1] = kNegative;
    h2[x2] = kNegative;
    HypothesisClass cls({Hypothesis::constant(m, kPositive), Hypothesis(h2)});

    const Real p = (nu - Real(4) * eps) / (Real(2) - nu);
    const Real q = (nu + Real(4) * eps) / (Real(2) - nu);
    std::vector<BasicLabeledDistribution<Real>> ds;
    {
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        marginal[x1] = nu;
        marginal[z(1)] = Real(1) - nu;
        eta[x1] = Real(1);
        eta[z(1)] = Real(1);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    for (std::size_t i = 2; i <= k; ++i) {
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        marginal[x2] = nu / Real(2);
        marginal[z(i)] = Real(1) - nu / Real(2);
        eta[x2] = Real(0);
        eta[z(i)] = Real(1) - (flipped && *flipped == i ? q : p);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    return BasicInstance<Real>(std::move(cls), std::move(ds));
}

enum class Example1Case { a, b };

/// Two-distribution example with H = {h1, h2}, realized on four points:
/// a1 (agreement) and a2 (disagreement) carry D1, b (disagreement) and c
/// (agreement) carry D2. h1 = all +1, h2 = -1 on a2 and b. D1 labels both of
/// its points +1 with masses 1-2nu' and 2nu', so L1(h1) = 0 and L1(h2) = 2nu'.
/// D2 = nu'*(b, -1) + (1-nu')*(c, noisy), with the noise on c chosen so the
/// agreement-region error (1-nu') L(., D_c) equals nu' - eps (case a) or
/// nu' + eps (case b).
template <class Real = double>
BasicInstance<Real> genExample1(const Real& nuPrime, const Real& eps, Example1Case which) {
    require(eps > Real(0) && nuPrime - eps >= Real(0), "example1 needs nu' >= eps > 0");
    require(Real(2) * nuPrime < Real(1) && nuPrime + eps < Real(1) - nuPrime, "example1 needs small nu' and eps");
    const std::size_t m = 4;
    const Point a1 = 0, a2 = 1, b = 2, c = 3;
    std::vector<Label> h2(m, kPositive);
    h2[a2] = kNegative;
    h2[b] = kNegative;
    HypothesisClass cls({Hypothesis::constant(m, kPositive), Hypothesis(h2)});

    std::vector<BasicLabeledDistribution<Real>> ds;
    {
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        marginal[a1] = Real(1) - Real(2) * nuPrime;
        marginal[a2] = Real(2) * nuPrime;
        eta[a1] = Real(1);
        eta[a2] = Real(1);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    {
        const Real agreementError = which == Example1Case::a ? Real(nuPrime - eps) : Real(nuPrime + eps);
        std::vector<Real> marginal(m, Real(0)), eta(m, Real(0));
        marginal[b] = nuPrime;
        marginal[c] = Real(1) - nuPrime;
        eta[b] = Real(0);
        eta[c] = Real(1) - agreementError / (Real(1) - nuPrime);
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    return BasicInstance<Real>(std::move(cls), std::move(ds));
}

struct StarLbIndex {
    std::size_t i = 1;
    std::size_t j = 1;
    friend bool operator==(const StarLbIndex&, const StarLbIndex&) = default;
};

struct SeparationReport {
    bool analytic = false;              // 1/theta > 2 eps
    std::optional<bool> exhaustive;     // no labeling eps-optimal on two instances
    std::size_t pairsChecked = 0;
    std::size_t labelingsChecked = 0;
    bool consistent() const { return !analytic || !exhaustive || *exhaustive; }
};

/// Checks that no labeling of the k*theta points is eps-optimal on two
/// distinct star-lb instances (all of them realizable, so eps-optimal means
/// every block error <= eps). The exhaustive branch runs only when
/// k*theta <= 14.
template <class Real = double>
SeparationReport verifySeparation(std::size_t k, std::size_t theta, const std::vector<StarLbIndex>& family,
                                  const Real& eps) {
    require(family.size() >= 2, "separation needs at least two instances");
    for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a + 1; b < family.size(); ++b)
            require(!(family[a] == family[b]), "separation instances must be distinct");
    for (const auto& f : family) require(f.i >= 1 && f.i <= k && f.j >= 1 && f.j <= theta, "family index out of range");

    SeparationReport report;
    report.analytic = Real(1) / Real(static_cast<long long>(theta)) > Real(2) * eps;
    const std::size_t m = k * theta;
    if (m > 14) return report;

    // Worst block error of a labeling under instance (i, j): every block is
    // labeled all -1 except the flipped point.
    auto worstError = [&](std::uint32_t labeling, const StarLbIndex& f) {
        Real worst(0);
        for (std::size_t b = 0; b < k; ++b) {
            long long mismatches = 0;
            for (std::size_t p = b * theta; p < (b + 1) * theta; ++p) {
                const bool truth = b + 1 == f.i && p == (f.i - 1) * theta + f.j - 1;
                const bool predicted = (labeling >> p) & 1U;
                if (truth != predicted) ++mismatches;
            }
            worst = std::max(worst, Real(mismatches) / Real(static_cast<long long>(theta)));
        }
        return worst;
    };

    bool separated = true;
    for (std::uint32_t labeling = 0; labeling < (1U << m); ++labeling) {
        ++report.labelingsChecked;
        std::size_t good = 0;
        for (const auto& f : family)
            if (worstError(labeling, f) <= eps) ++good;
        if (good >= 2) separated = false;
    }
    report.pairsChecked = family.size() * (family.size() - 1) / 2;
    report.exhaustive = separated;
    return report;
}

/// Every (i, j) with i in [1,k], j in [1,theta].
inline std::vector<StarLbIndex> starLbFamily(std::size_t k, std::size_t theta) {
    std::vector<StarLbIndex> out;
    for (std::size_t i = 1; i <= k; ++i)
        for (std::size_t j = 1; j <= theta; ++j) out.push_back({i, j});
    return out;
}

/// KL(Ber(p) || Ber(q)) in closed form.
inline double klBernoulli(double p, double q) {
    require(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0, "Bernoulli KL needs p, q in (0,1)");
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

namespace detail {

inline double adaptiveSimpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                              double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptiveSimpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptiveSimpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace detail

/// The same divergence as the integral of (x - p) / (x (1 - x)) from p to q,
/// by adaptive Simpson quadrature.
inline double klBernoulliIntegral(double p, double q, double tol = 1e-13) {
    require(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0, "Bernoulli KL needs p, q in (0,1)");
    if (p == q) return 0.0;
    const std::function<double(double)> f = [p](double x) { return (x - p) / (x * (1.0 - x)); };
    const double fa = f(p), fb = f(q), fm = f(0.5 * (p + q));
    const double whole = (q - p) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptiveSimpson(f, p, q, fa, fm, fb, whole, tol, 50);
}

/// Random instance for property tests and the `random` family: m points,
/// `hypotheses` distinct random labelings, k random distributions with a
/// random number of zero-mass points. Deterministic in the seed.
inline Instance genRandom(std::size_t m, std::size_t hypotheses, std::size_t k, std::uint64_t seed) {
    require(m >= 1 && k >= 1 && hypotheses >= 1, "random instance needs m, |H|, k >= 1");
    require(m >= 63 || hypotheses <= (std::uint64_t{1} << m), "more hypotheses requested than labelings exist");
    RandomStream rng(splitmix64(seed));
    std::vector<Hypothesis> hs;
    std::set<Hypothesis> seen;
    while (hs.size() < hypotheses) {
        std::vector<Label> labels(m);
        for (auto& y : labels) y = rng.bernoulli(0.5) ? kPositive : kNegative;
        Hypothesis h(std::move(labels));
        if (seen.insert(h).second) hs.push_back(std::move(h));
    }
    std::vector<LabeledDistribution> ds;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> marginal(m), eta(m);
        double total = 0.0;
        for (std::size_t x = 0; x < m; ++x) {
            marginal[x] = rng.bernoulli(0.2) ? 0.0 : rng.uniform() + 1e-3;
            total += marginal[x];
            const double u = rng.uniform();
            eta[x] = u < 0.3 ? 0.0 : (u < 0.6 ? 1.0 : rng.uniform());
        }
        if (total == 0.0) {
            marginal[rng.index(m)] = 1.0;
            total = 1.0;
        }
        for (auto& v : marginal) v /= total;
        ds.emplace_back(std::move(marginal), std::move(eta));
    }
    return Instance(HypothesisClass(std::move(hs)), std::move(ds));
}

} // namespace amdl
