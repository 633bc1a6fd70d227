#ifndef MWECX_RNG_HPP
#define MWECX_RNG_HPP

#include <cstdint>
#include <numeric>
#include <vector>

namespace mwecx {

// Portable deterministic generator: splitmix64 (Steele, Lea, Flood 2014).
// Produces the same stream on every platform for a given (seed, stream) pair,
// which is what makes seeded experiments byte-reproducible. Independent
// streams are derived by hashing the stream id into the initial state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1): top 53 bits scaled, exactly representable.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (0ULL - n) % n;
        while (true) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Fisher-Yates shuffle of index vector 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(idx[i - 1], idx[j]);
        }
        return idx;
    }

private:
    std::uint64_t state_;
};

}  // namespace mwecx

#endif
