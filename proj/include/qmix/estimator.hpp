#pragma once

#include <span>
#include <string>
#include <vector>

#include "qmix/likelihood.hpp"

namespace qmix {

struct SearchOptions {
    double lo = 0.05;
    double hi = 0.95;
    std::size_t coarse_points = 33;
    double gtol = 1e-8;   // gradient magnitude accepted as stationary
    double vtol = 1e-10;  // bracket width at which refinement stops
    bool allow_exclusion = false;
    GradientVariant variant = GradientVariant::Total;
    bool parallel = true;
};

struct VBracket {
    double lo = 0.0;
    double hi = 0.0;
};

struct EstimateResult {
    double v_hat = 0.0;
    double logl_at_vhat = 0.0;
    double grad_at_vhat = 0.0;
    std::size_t n_evals = 0;
    std::size_t excluded_samples = 0;
    VBracket bracket;

    // True when the maximum sits at an edge of the evaluable domain rather
    // than at an interior stationary point; grad_at_vhat then need not be
    // small.
    bool boundary_bracketed = false;

    // Interior descending sign changes of the gradient found by the scan.
    // All are refined; v_hat is the one with the highest likelihood (or the
    // better edge).
    std::size_t sign_changes = 0;
};

struct ScanPoint {
    double v = 0.0;
    double logl = 0.0;
    double dlogl = 0.0;
    std::size_t excluded = 0;
    bool ok = false;
    std::string error;  // nonempty when !ok
};

struct ScanOptions {
    bool allow_exclusion = false;
    GradientVariant variant = GradientVariant::Total;
    bool parallel = true;
};

// Largest interval of coupling values on which every sample admits a valid
// source reconstruction. Per sample the condition |arcsine argument| <= 1 is
// a quadratic inequality in v^2, solved in closed form and intersected over
// the set (and with `search`). May be empty (lo >= hi).
Interval feasible_interval(const SampleSet& data, Interval search = {0.0, 1.0});

// Evaluate likelihood and gradient on a sorted grid. Failed points are
// reported in place, never dropped; throws ScanError only if every point
// fails.
std::vector<ScanPoint> scan(const SampleSet& data, const PriorConfig& cfg,
                            std::span<const double> grid, const ScanOptions& opts = {});

// Maximum-likelihood estimate of the coupling parameter. A coarse scan over
// the evaluable domain locates descending sign changes of the gradient; each
// is refined by bisection until the bracket is narrower than vtol. The edges
// of the evaluable domain compete as candidates, since the likelihood of this
// mixture typically peaks where the data stops being invertible. Throws
// NoInteriorMaximumError when nothing in the search domain evaluates.
EstimateResult estimate_v(const SampleSet& data, const PriorConfig& cfg,
                          const SearchOptions& opts = {});

}  // namespace qmix
