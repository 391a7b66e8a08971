#pragma once

#include <cstdint>

namespace rabi {

// splitmix64: expands a 64-bit seed into a well-mixed stream; used only to
// derive generator states so trajectory streams are pure functions of
// (master_seed, index) regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna, public domain reference algorithm),
// hand-rolled so byte-identical output is guaranteed across platforms and
// standard-library versions.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in the open interval (0, 1).
    double uniform_open() {
        for (;;) {
            const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Seed for trajectory `index` under `master_seed`.
inline std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t sm = master_seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    return splitmix64(sm);
}

}  // namespace rabi
