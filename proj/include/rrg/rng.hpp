#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rrg {

// SplitMix64 step (Steele, Lea, Flood 2014). Used only for seeding.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman, Vigna 2019). Each (seed, stream) pair selects an
// independent substream, so per-trial generators reproduce regardless of
// execution order: trial i always uses Xoshiro256pp(master_seed, i).
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t sm = seed;
        splitmix64(sm);
        sm ^= 0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased integer in [0, n) via bitmask rejection.
    std::uint64_t bounded(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> countl_zero(n - 1);
        std::uint64_t r;
        do {
            r = next() & mask;
        } while (r >= n);
        return r;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static int countl_zero(std::uint64_t x) {
        int n = 0;
        for (std::uint64_t bit = std::uint64_t{1} << 63; bit != 0 && !(x & bit); bit >>= 1) ++n;
        return n;
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace rrg
