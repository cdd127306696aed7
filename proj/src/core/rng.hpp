#pragma once

#include <cmath>
#include <cstdint>

namespace bohmex {

// Deterministic, platform-independent RNG. std:: distributions are
// implementation-defined, so uniform/normal are spelled out here; byte-exact
// reproducibility of every artifact depends on it.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(uint64_t seed = 1) {
        uint64_t s = seed;
        for (auto& w : s_) w = splitmix64(s);
    }

    // derive an independent stream for a labelled substream
    Rng fork(uint64_t label) const {
        uint64_t s = s_[0] ^ (0x9e3779b97f4a7c15ULL * (label + 1)) ^ s_[3];
        return Rng(splitmix64(s));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via polar Marsaglia (deterministic given the stream)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bohmex
