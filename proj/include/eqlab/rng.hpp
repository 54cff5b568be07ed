#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace eqlab::rng {

// splitmix64 finalizer (Steele/Lea/Flood).
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter mode: value i of stream `seed`. Stateless, so sample i can be
// generated by any worker and the result is independent of the partitioning.
inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t i) {
    return splitmix64(splitmix64(seed ^ 0x6A09E667F3BCC909ULL) + i * 0x9E3779B97F4A7C15ULL);
}

inline double counter_uniform01(std::uint64_t seed, std::uint64_t i) {
    return static_cast<double>(counter_u64(seed, i) >> 11) * 0x1.0p-53;
}

// Box-Muller pair from counters 2i, 2i+1 of the stream.
inline void counter_gauss_pair(std::uint64_t seed, std::uint64_t i, double& z0, double& z1) {
    const double u1 = counter_uniform01(seed, 2 * i);
    const double u2 = counter_uniform01(seed, 2 * i + 1);
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

// Small sequential generator for setup construction (not used in sampling loops).
class Sequence {
  public:
    explicit Sequence(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t next_u64() { return counter_u64(seed_, n_++); }
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z0, z1;
        counter_gauss_pair(seed_, n_pair_++, z0, z1);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }
    // i.i.d. index sample without replacement (Fisher-Yates on an index vector).
    template <typename Int>
    void shuffle_prefix(std::vector<Int>& v, std::size_t k) {
        for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform01() * double(v.size() - i));
            if (j >= v.size()) j = v.size() - 1;
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::uint64_t seed_;
    std::uint64_t n_ = 0;
    std::uint64_t n_pair_ = 1'000'000'007ULL;  // separate counter range for gaussians
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace eqlab::rng
