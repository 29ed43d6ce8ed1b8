#include "qmix/rng.hpp"

#include <cmath>
#include <numbers>

namespace qmix {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) {
        u1 = uniform01();
    }
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
}

}  // namespace qmix
