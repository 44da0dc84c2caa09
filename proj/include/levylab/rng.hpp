#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace levylab {

// Deterministic per-path random stream. Streams are keyed by
// (experiment seed, path index); the key is expanded with SplitMix64 into
// xoshiro256++ state, so any worker can reconstruct path k's stream without
// coordination. All variate transforms are implemented here rather than via
// <random> distributions, which keeps output identical across standard
// library implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& s : state_) s = splitmix64(z);
    }

    std::uint64_t next_u64() {
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

    // uniform on the open interval (0,1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // inverse transform: -ln(U)/rate
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Box-Muller pair, one half cached per stream
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace levylab
