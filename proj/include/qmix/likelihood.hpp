#pragma once

#include <cstdint>
#include <vector>

#include "qmix/priors.hpp"
#include "qmix/sample_set.hpp"

namespace qmix {

enum class GradientVariant {
    Total,        // full derivative: direct coupling terms plus the indirect
                  // dependency of the reconstructed phase on the coupling
    PartialOnly,  // the misreading that drops the indirect Jacobian term;
                  // kept to demonstrate the bias it causes
};

const char* to_string(GradientVariant variant) noexcept;

enum class GradientRoute {
    ClosedForm,  // single fused expression per sample
    Assembled,   // built from the mixing-model derivative blocks
};

struct EvalOptions {
    // When set, samples that fail at the queried v (not invertible, out of
    // support, near-singular phase) are skipped and counted instead of
    // aborting the evaluation. Off by default: skipping changes the
    // objective, so it must be asked for.
    bool allow_exclusion = false;

    // Samples with |cos delta| below this are near-singular. Values below
    // tol::kNearSingularCos are raised to it.
    double cos_guard = tol::kNearSingularCos;

    bool parallel = true;

    // Optional external active-sample mask (size() entries, nonzero = use).
    // Lets a finite-difference harness pin one subset across a stencil.
    const std::vector<std::uint8_t>* mask = nullptr;
};

struct Eval {
    double value = 0.0;
    std::size_t used = 0;      // samples that contributed
    std::size_t excluded = 0;  // samples skipped by mask or exclusion
};

// Mean log-likelihood of the data at coupling v: per-sample sum of source
// log-densities at the reconstructed sources minus the log-Jacobian, averaged
// over the set. Sources are reconstructed at the queried v on every call.
Eval log_likelihood(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                    const EvalOptions& opts = {});

// Derivative of the mean log-likelihood with respect to the coupling,
// including the indirect dependency of the reconstructed phase. The two
// routes are algebraically identical and serve as mutual cross-checks.
Eval dlogl_dv_total(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                    GradientRoute route = GradientRoute::ClosedForm,
                    const EvalOptions& opts = {});

// The incorrect variant: the Jacobian term uses only the partial derivative
// with sources held fixed. Exists solely to demonstrate the error this
// misreading introduces; everything else matches the total variant.
Eval dlogl_dv_partial_only(const SampleSet& data, MixingParam v, const PriorConfig& cfg,
                           const EvalOptions& opts = {});

// Per-sample evaluability at the queried v: invertible, inside the prior
// support, and |cos delta| >= cos_guard. 1 = evaluable.
std::vector<std::uint8_t> evaluable_mask(const SampleSet& data, MixingParam v,
                                         const PriorConfig& cfg, double cos_guard);

std::vector<SampleStatus> sample_statuses(const SampleSet& data, MixingParam v,
                                          const PriorConfig& cfg, double cos_guard);

}  // namespace qmix
