#pragma once

#include <cmath>
#include <cstdint>

namespace hslab {

// Deterministic cross-platform generator: xoshiro256** seeded through
// splitmix64 from (seed, stream). Same (seed, stream) gives the same
// sequence on every platform; streams decorrelate per-source consumers.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {
        uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& s : s_) s = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    uint64_t next() {
        uint64_t result = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1): 53-bit mantissa.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1]; safe for log().
    double uniform_pos() { return double((next() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Uniform direction index in {0,1,2,3}; consumes exactly one draw.
    int direction4() { return static_cast<int>(next() >> 62); }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t seed_, stream_;
    uint64_t s_[4];
};

}  // namespace hslab
