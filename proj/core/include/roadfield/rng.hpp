#pragma once

#include <cstdint>

namespace roadfield {

/// Small deterministic generator (splitmix64). Used wherever reproducibility
/// across toolchains matters: solver start vectors, test corpora, sweeps.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Symmetric around zero, uniform in [-1, 1).
    double signed_unit() { return 2.0 * next_double() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace roadfield
