#include "qmix/priors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "qmix/parallel.hpp"
#include "qmix/rng.hpp"

namespace qmix {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Interval& support_of(const PriorConfig& cfg, SourceId which) noexcept {
    switch (which) {
        case SourceId::R1: return cfg.r1_support;
        case SourceId::R2: return cfg.r2_support;
        case SourceId::Delta: break;
    }
    return cfg.delta_support;
}

// Rejection-free inverse-CDF draw for the phase; the loop only guards the
// measure-zero case of landing exactly on a support endpoint.
double draw_in(Rng& rng, const Interval& sup, bool raised_cosine) noexcept {
    for (;;) {
        double u;
        if (raised_cosine) {
            const double slo = std::sin(sup.lo);
            const double shi = std::sin(sup.hi);
            u = std::asin(slo + (shi - slo) * rng.uniform01());
        } else {
            u = rng.uniform(sup.lo, sup.hi);
        }
        if (sup.contains(u)) {
            return u;
        }
    }
}

std::string canonical_fields(const PriorConfig& cfg) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "r1:%.17g,%.17g;r2:%.17g,%.17g;delta:%s,%.17g,%.17g",
                  cfg.r1_support.lo, cfg.r1_support.hi,
                  cfg.r2_support.lo, cfg.r2_support.hi,
                  cfg.delta_family == DeltaFamily::Uniform ? "uniform" : "raised-cosine",
                  cfg.delta_support.lo, cfg.delta_support.hi);
    return buf;
}

}  // namespace

void PriorConfig::validate() const {
    const auto check_interval = [](const Interval& iv, const char* name, double lo, double hi) {
        if (!(iv.lo < iv.hi)) {
            throw ConfigError(std::string(name) + " must satisfy lo < hi");
        }
        if (!(iv.lo >= lo && iv.hi <= hi)) {
            throw ConfigError(std::string(name) + " must lie within the valid source range");
        }
    };
    check_interval(r1_support, "r1_support", 0.0, 1.0);
    check_interval(r2_support, "r2_support", 0.0, 1.0);
    if (!(r1_support.lo > 0.0 && r2_support.hi < 1.0)) {
        throw ConfigError("amplitude supports must exclude 0 and 1");
    }
    if (!(r1_support.hi < r2_support.lo)) {
        throw ConfigError("r1_support must lie strictly below r2_support");
    }
    check_interval(delta_support, "delta_support", -kHalfPi, kHalfPi);
}

std::uint64_t PriorConfig::hash() const {
    // FNV-1a over the canonical serialization
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : canonical_fields(*this)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<SourceVector> sample_sources(const PriorConfig& cfg, std::size_t n, std::uint64_t seed) {
    cfg.validate();
    if (n == 0) {
        throw PreconditionError("sample_sources requires n >= 1");
    }
    return par::fill_indexed<SourceVector>(
        n, [&](std::size_t i) { return detail::draw_source(cfg, seed, i); });
}

double log_pdf(const PriorConfig& cfg, SourceId which, double u) {
    const double value = detail::log_pdf_raw(cfg, which, u);
    if (std::isnan(value)) {
        throw OutOfSupportError("log_pdf queried outside the configured support");
    }
    return value;
}

double score(const PriorConfig& cfg, SourceId which, double u) {
    const double value = detail::score_raw(cfg, which, u);
    if (std::isnan(value)) {
        throw OutOfSupportError("score queried outside the configured support");
    }
    return value;
}

namespace detail {

double log_pdf_raw(const PriorConfig& cfg, SourceId which, double u) noexcept {
    const Interval& sup = support_of(cfg, which);
    if (!sup.contains(u)) {
        return kNaN;
    }
    if (which == SourceId::Delta && cfg.delta_family == DeltaFamily::RaisedCosine) {
        // density cos(u) / (sin(hi) - sin(lo))
        return std::log(std::cos(u)) - std::log(std::sin(sup.hi) - std::sin(sup.lo));
    }
    return -std::log(sup.width());
}

double score_raw(const PriorConfig& cfg, SourceId which, double u) noexcept {
    const Interval& sup = support_of(cfg, which);
    if (!sup.contains(u)) {
        return kNaN;
    }
    if (which == SourceId::Delta && cfg.delta_family == DeltaFamily::RaisedCosine) {
        return std::tan(u);
    }
    return 0.0;
}

SourceVector draw_source(const PriorConfig& cfg, std::uint64_t seed, std::uint64_t index) noexcept {
    Rng rng(mix_seed(seed, index));
    SourceVector s;
    s.r1 = draw_in(rng, cfg.r1_support, false);
    s.r2 = draw_in(rng, cfg.r2_support, false);
    s.delta = draw_in(rng, cfg.delta_support, cfg.delta_family == DeltaFamily::RaisedCosine);
    return s;
}

}  // namespace detail

}  // namespace qmix
