#pragma once

#include "qmix/priors.hpp"
#include "qmix/sample_set.hpp"

namespace qmix {

// Draw n sources from the priors and push them through the forward mixture at
// v_true. Deterministic in (cfg, v_true, n, seed); each sample derives its
// own generator seed, so the result is independent of the thread count.
SampleSet generate(const PriorConfig& cfg, MixingParam v_true, std::size_t n, std::uint64_t seed);

struct PerturbResult {
    SampleSet data;
    std::size_t dropped = 0;  // samples invalidated by the perturbation
};

// Additive Gaussian noise on each observation component, followed by validity
// filtering. Not part of the mixture model; intended for robustness
// experiments. noise_scale == 0 returns a bit-identical copy.
PerturbResult perturb(const SampleSet& data, double noise_scale, std::uint64_t seed);

}  // namespace qmix
