#pragma once

#include <cstdint>
#include <vector>

#include "qmix/mixing_model.hpp"

namespace qmix {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double u) const noexcept { return u > lo && u < hi; }
};

// Families for the phase prior. The amplitude priors are always uniform.
// "RaisedCosine" is the density proportional to cos(u) on the support, which
// has the analytic score tan(u); the uniform family has zero score and is
// kept to isolate the Jacobian term of the likelihood gradient.
enum class DeltaFamily {
    Uniform,
    RaisedCosine,
};

enum class SourceId {
    R1 = 0,
    R2 = 1,
    Delta = 2,
};

// Declared source densities. The two amplitude supports are disjoint with
// r1_support below r2_support, which enforces r1 < r2 under independent
// sampling.
struct PriorConfig {
    Interval r1_support{0.15, 0.45};
    Interval r2_support{0.55, 0.85};
    DeltaFamily delta_family = DeltaFamily::RaisedCosine;
    Interval delta_support{-1.5707963267948966, 1.5707963267948966};

    void validate() const;       // throws ConfigError
    std::uint64_t hash() const;  // over the canonical field serialization
};

// n independent draws, deterministic in (cfg, seed) and independent of the
// thread count (each draw owns a derived seed).
std::vector<SourceVector> sample_sources(const PriorConfig& cfg, std::size_t n, std::uint64_t seed);

// Log-density of source `which` at u; throws OutOfSupportError outside the
// configured support.
double log_pdf(const PriorConfig& cfg, SourceId which, double u);

// Score of source `which` at u: negative derivative of the log-density.
// Zero for the uniform families, tan(u) for the raised-cosine phase prior.
double score(const PriorConfig& cfg, SourceId which, double u);

namespace detail {

// Non-throwing variants used by the likelihood kernels; NaN means
// out-of-support.
double log_pdf_raw(const PriorConfig& cfg, SourceId which, double u) noexcept;
double score_raw(const PriorConfig& cfg, SourceId which, double u) noexcept;

SourceVector draw_source(const PriorConfig& cfg, std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace detail

}  // namespace qmix
