#pragma once

#include <cstdint>
#include <random>

namespace rbb {

/// Seeded 64-bit generator used by every problem generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversion to doubles is done here (53 high bits scaled by
/// 2^-53) instead of through std::uniform_real_distribution, whose algorithm
/// is implementation-defined. Together this gives identical problems for a
/// given seed on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent child seeds from a master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt)
{
    return mix_seed(master ^ mix_seed(salt));
}

} // namespace rbb
