#pragma once
//
// Seeded random streams. A run owns k+1 streams: stream i < k drives the
// example and label oracles of distribution i, stream k is the learner's own
// randomness (surrogate resampling, tie-free choices). Stream s is seeded with
// splitmix64(base + golden * (s + 1)) so streams never share a state and the
// split order is fixed.
//

#include "amdl/error.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace amdl {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kGoldenGamma;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t streamSeed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + kGoldenGamma * (stream + 1));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : gen_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        require(n > 0, "index draw from an empty range");
        return static_cast<std::size_t>(std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_));
    }

    std::mt19937_64& engine() noexcept { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Inverse-CDF sampler over a fixed pmf. Zero-mass points are never returned
/// because the search is for the first cumulative value strictly above u.
class DiscreteSampler {
public:
    DiscreteSampler() = default;

    explicit DiscreteSampler(std::span<const double> pmf) : cdf_(pmf.size()) {
        require(!pmf.empty(), "discrete sampler over an empty support");
        double acc = 0.0;
        for (std::size_t x = 0; x < pmf.size(); ++x) {
            acc += pmf[x];
            cdf_[x] = acc;
        }
        total_ = acc;
        require(total_ > 0.0, "discrete sampler over zero total mass");
    }

    std::size_t operator()(RandomStream& rng) const {
        const double u = rng.uniform() * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) {
            // u landed on the rounding slack above the last cumulative value;
            // return the last point with positive mass.
            it = cdf_.end() - 1;
            while (it != cdf_.begin() && *it == *(it - 1)) --it;
        }
        return static_cast<std::size_t>(it - cdf_.begin());
    }

    std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

} // namespace amdl
