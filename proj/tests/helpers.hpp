#pragma once

#include <algorithm>
#include <cmath>

#include "qmix/mixing_model.hpp"
#include "qmix/rng.hpp"

namespace qmix::test {

inline double rel_err(double got, double want, double floor = 1e-12) {
    return std::abs(got - want) / std::max(std::abs(want), floor);
}

// Random point of the canonical domain with margins keeping every derivative
// formula well away from its singularities.
inline SourceVector random_source(Rng& rng, double r_margin = 0.05, double gap = 0.03,
                                  double delta_max = 1.45) {
    SourceVector s;
    s.r1 = rng.uniform(r_margin, 1.0 - r_margin - gap);
    s.r2 = rng.uniform(s.r1 + gap, 1.0 - r_margin);
    s.delta = rng.uniform(-delta_max, delta_max);
    return s;
}

inline MixingParam random_coupling(Rng& rng, double margin = 0.05) {
    return MixingParam{rng.uniform(margin, 1.0 - margin)};
}

}  // namespace qmix::test
