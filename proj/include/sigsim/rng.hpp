#pragma once

#include <cstdint>
#include <random>

namespace sigsim {

/// Seeded generator with a platform-independent uniform draw. The standard
/// distributions are implementation-defined, so draws are built from raw bits.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace sigsim
