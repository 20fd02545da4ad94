#pragma once

#include "amdl/error.hpp"
#include "amdl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace amdl {

inline double mean(const std::vector<double>& v) {
    require(!v.empty(), "mean of an empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    require(!v.empty(), "median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline AffineFit fitAffine(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "affine fit needs two or more paired points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0, "affine fit needs distinct x values");
    AffineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

/// Exponent b of y ~ a * x^b from a regression of ln y on ln x.
inline AffineFit fitPowerLaw(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(x[i] > 0.0 && y[i] > 0.0, "power-law fit needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fitAffine(lx, ly);
}

/// Percentile bootstrap interval for the mean, seeded.
inline std::pair<double, double> bootstrapMeanCi(const std::vector<double>& v, std::uint64_t seed,
                                                 std::size_t reps = 1000, double level = 0.95) {
    require(!v.empty(), "bootstrap of an empty sample");
    RandomStream rng(splitmix64(seed));
    std::vector<double> means(reps);
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) s += v[rng.index(v.size())];
        m = s / static_cast<double>(v.size());
    }
    std::sort(means.begin(), means.end());
    const double tail = (1.0 - level) / 2.0;
    auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(reps - 1)));
        return means[std::min(idx, reps - 1)];
    };
    return {at(tail), at(1.0 - tail)};
}

} // namespace amdl
