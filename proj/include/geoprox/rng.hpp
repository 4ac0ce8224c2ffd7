#pragma once

#include <cmath>
#include <cstdint>

namespace geoprox {

// splitmix64; used to spread seeds and to derive independent per-trial streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** with fully deterministic, platform-independent output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Stream for trial `index` derived from a root seed; streams are
    // independent of how trials are scheduled across threads.
    static Rng for_trial(std::uint64_t root_seed, std::uint64_t index) {
        std::uint64_t sm = root_seed;
        std::uint64_t a = splitmix64(sm);
        sm = a ^ (index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // standard normal via Box-Muller (deterministic two-call form)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        while (u <= 0.0) u = uniform01();
        const double v = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * v);
        have_spare_ = true;
        return mag * std::cos(two_pi * v);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace geoprox
