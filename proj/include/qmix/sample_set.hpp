#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmix/mixing_model.hpp"

namespace qmix {

struct SampleMeta {
    std::optional<double> v_true;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> prior_hash;  // hex of PriorConfig::hash()
    std::optional<double> noise_scale;
};

// A sequence of observations plus generation metadata. Temporal averages over
// it are plain arithmetic means. Immutable by convention once built.
struct SampleSet {
    std::vector<ObservationVector> observations;
    SampleMeta meta;

    std::size_t size() const noexcept { return observations.size(); }

    // Nonempty and every element satisfies the observation invariants.
    void validate() const;
};

}  // namespace qmix
