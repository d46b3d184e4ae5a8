#pragma once

#include <cstdint>
#include <random>

namespace qlss {

// Thin wrapper over mt19937_64 producing doubles through fixed bit
// manipulation rather than std distributions, whose algorithms are
// implementation-defined; outputs are reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1): 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Symmetric uniform in [-s, s].
    double symmetric(double s) { return uniform(-s, s); }

    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace qlss
