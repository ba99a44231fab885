#pragma once
#include <cstdint>
#include <random>
#include <vector>

namespace lcsmech {

/// Default seed for every sampled check; reports always record the seed used.
inline constexpr std::uint64_t kDefaultSeed = 1729;

/// Seeded source of sample points.  The mapping from engine output to doubles
/// is fixed here so that a seed reproduces the same points on every platform.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed = kDefaultSeed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    double uniform(double lo = -2.0, double hi = 2.0) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    std::vector<double> point(int dim, double lo = -2.0, double hi = 2.0) {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (auto& v : x) v = uniform(lo, hi);
        return x;
    }

    /// Integer in [lo, hi].
    long integer(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(engine_() % span);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace lcsmech
