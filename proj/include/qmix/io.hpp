#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qmix/datagen.hpp"
#include "qmix/estimator.hpp"
#include "qmix/validation.hpp"

namespace qmix::io {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// PRNG and seed-derivation scheme in force; recorded in dataset metadata and
// checked on load so files stay reproducible across releases.
inline constexpr const char* kSeedPolicy = "splitmix64+mt19937_64/per-sample/v1";

struct GenerateParams {
    double v_true = 0.6;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
};

struct ToleranceParams {
    double fd_step = 1e-5;
    double audit_cos_guard = 0.05;
    double rel_floor = 1e-12;
};

// The single JSON configuration document. Every section is optional and
// defaults as above; unknown keys are rejected.
struct RunConfig {
    PriorConfig priors;
    GenerateParams generate;
    SearchOptions search;
    ToleranceParams tolerances;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

std::string prior_hash_hex(const PriorConfig& cfg);

// 17 significant digits; round-trips any finite double exactly.
std::string format_double(double x);

// Dataset CSV with header t,p1,p2,p3 plus a JSON metadata sidecar next to it.
// When the generating priors are known they are embedded in the sidecar.
void write_dataset(const SampleSet& data, const std::filesystem::path& csv_path,
                   const PriorConfig* priors = nullptr);
SampleSet read_dataset(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void write_audit_csv(std::ostream& os, const std::vector<AuditRow>& rows);
void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points);

std::string estimate_to_json(const EstimateResult& result, GradientVariant variant,
                             bool allow_exclusion);

// "lo:hi:step", endpoints included (up to rounding slack on hi).
std::vector<double> parse_grid(const std::string& spec);

}  // namespace qmix::io
