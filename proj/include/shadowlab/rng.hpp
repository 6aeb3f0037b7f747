#pragma once

#include <cstdint>
#include <random>

namespace shadowlab {

/// Deterministic random source: a fixed 64-bit engine plus explicit bit-level
/// conversions, so identical seeds give identical streams on every platform
/// (the standard distributions make no such guarantee).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * u01(); }

    /// Uniform index in [0, n).
    std::int64_t index(std::int64_t n) {
        const auto i = static_cast<std::int64_t>(u01() * static_cast<double>(n));
        return i >= n ? n - 1 : i;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

} // namespace shadowlab
