#pragma once

#include "qmix/likelihood.hpp"

namespace qmix::reference {

// Plain serial implementations of the likelihood reductions, written against
// the public scalar operations with a direct accumulation loop. They are the
// reference the parallel kernels are compared to in tests and in the
// benchmark; strict evaluation only.

double log_likelihood(const SampleSet& data, MixingParam v, const PriorConfig& cfg);
double dlogl_dv_total(const SampleSet& data, MixingParam v, const PriorConfig& cfg);
double dlogl_dv_partial_only(const SampleSet& data, MixingParam v, const PriorConfig& cfg);

}  // namespace qmix::reference
