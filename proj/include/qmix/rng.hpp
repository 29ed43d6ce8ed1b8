#pragma once

#include <cstdint>
#include <random>

namespace qmix {

// splitmix64-style finalizer used to derive independent per-stream seeds, so
// every sample can own its generator and per-sample work stays order-free.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) noexcept;

// Deterministic generator. std::mt19937_64 is bit-specified by the standard;
// the double conversion below sidesteps std::uniform_real_distribution, whose
// algorithm is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace qmix
