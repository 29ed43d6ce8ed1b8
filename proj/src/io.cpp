#include "qmix/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace qmix::io {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool found = false;
        for (const char* k : known) {
            if (item.key() == k) {
                found = true;
                break;
            }
        }
        if (!found) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

Interval parse_interval(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(std::string(name) + " must be a [lo, hi] number pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json interval_to_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

void parse_priors(const json& j, PriorConfig& out) {
    reject_unknown_keys(j, "priors", {"r1_support", "r2_support", "delta_family", "delta_support"});
    if (j.contains("r1_support")) out.r1_support = parse_interval(j["r1_support"], "r1_support");
    if (j.contains("r2_support")) out.r2_support = parse_interval(j["r2_support"], "r2_support");
    if (j.contains("delta_support")) out.delta_support = parse_interval(j["delta_support"], "delta_support");
    if (j.contains("delta_family")) {
        const std::string family = j["delta_family"].get<std::string>();
        if (family == "uniform") {
            out.delta_family = DeltaFamily::Uniform;
        } else if (family == "raised-cosine") {
            out.delta_family = DeltaFamily::RaisedCosine;
        } else {
            throw ConfigError("delta_family must be 'uniform' or 'raised-cosine'");
        }
    }
}

json priors_to_json(const PriorConfig& cfg) {
    json j;
    j["r1_support"] = interval_to_json(cfg.r1_support);
    j["r2_support"] = interval_to_json(cfg.r2_support);
    j["delta_family"] = cfg.delta_family == DeltaFamily::Uniform ? "uniform" : "raised-cosine";
    j["delta_support"] = interval_to_json(cfg.delta_support);
    return j;
}

void parse_generate(const json& j, GenerateParams& out) {
    reject_unknown_keys(j, "generate", {"v_true", "n", "seed"});
    if (j.contains("v_true")) out.v_true = j["v_true"].get<double>();
    if (j.contains("n")) out.n = j["n"].get<std::size_t>();
    if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
}

void parse_search(const json& j, SearchOptions& out) {
    reject_unknown_keys(j, "search",
                        {"lo", "hi", "coarse_points", "gtol", "vtol", "allow_exclusion", "gradient"});
    if (j.contains("lo")) out.lo = j["lo"].get<double>();
    if (j.contains("hi")) out.hi = j["hi"].get<double>();
    if (j.contains("coarse_points")) out.coarse_points = j["coarse_points"].get<std::size_t>();
    if (j.contains("gtol")) out.gtol = j["gtol"].get<double>();
    if (j.contains("vtol")) out.vtol = j["vtol"].get<double>();
    if (j.contains("allow_exclusion")) out.allow_exclusion = j["allow_exclusion"].get<bool>();
    if (j.contains("gradient")) {
        const std::string g = j["gradient"].get<std::string>();
        if (g == "total") {
            out.variant = GradientVariant::Total;
        } else if (g == "partial-only") {
            out.variant = GradientVariant::PartialOnly;
        } else {
            throw ConfigError("gradient must be 'total' or 'partial-only'");
        }
    }
}

void parse_tolerances(const json& j, ToleranceParams& out) {
    reject_unknown_keys(j, "tolerances", {"fd_step", "audit_cos_guard", "rel_floor"});
    if (j.contains("fd_step")) out.fd_step = j["fd_step"].get<double>();
    if (j.contains("audit_cos_guard")) out.audit_cos_guard = j["audit_cos_guard"].get<double>();
    if (j.contains("rel_floor")) out.rel_floor = j["rel_floor"].get<double>();
}

std::string sanitize_csv_field(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    reject_unknown_keys(doc, "config", {"priors", "generate", "search", "tolerances"});

    RunConfig cfg;
    try {
        if (doc.contains("priors")) parse_priors(doc["priors"], cfg.priors);
        if (doc.contains("generate")) parse_generate(doc["generate"], cfg.generate);
        if (doc.contains("search")) parse_search(doc["search"], cfg.search);
        if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], cfg.tolerances);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    cfg.priors.validate();
    if (!(cfg.search.lo > 0.0 && cfg.search.lo < cfg.search.hi && cfg.search.hi < 1.0)) {
        throw ConfigError("search domain must satisfy 0 < lo < hi < 1");
    }
    if (!(cfg.generate.v_true > 0.0 && cfg.generate.v_true < 1.0)) {
        throw ConfigError("generate.v_true must lie strictly in (0,1)");
    }
    if (cfg.generate.n == 0) {
        throw ConfigError("generate.n must be at least 1");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string prior_hash_hex(const PriorConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg.hash()));
    return buf;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    if (p.extension() == ".csv") {
        p.replace_extension();
    }
    p += ".meta.json";
    return p;
}

void write_dataset(const SampleSet& data, const std::filesystem::path& csv_path,
                   const PriorConfig* priors) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open dataset file for writing: " + csv_path.string());
    }
    out << "t,p1,p2,p3\n";
    for (std::size_t t = 0; t < data.size(); ++t) {
        const ObservationVector& x = data.observations[t];
        out << t << ',' << format_double(x.p1) << ',' << format_double(x.p2) << ','
            << format_double(x.p3) << '\n';
    }
    if (!out) {
        throw IoError("failed writing dataset: " + csv_path.string());
    }

    json meta;
    meta["format_version"] = kFormatVersion;
    meta["tool_version"] = kToolVersion;
    meta["seed_policy"] = kSeedPolicy;
    meta["n"] = data.size();
    if (data.meta.v_true) meta["v_true"] = *data.meta.v_true;
    if (data.meta.seed) meta["seed"] = *data.meta.seed;
    if (data.meta.prior_hash) meta["prior_hash"] = *data.meta.prior_hash;
    if (data.meta.noise_scale) meta["noise_scale"] = *data.meta.noise_scale;
    if (priors != nullptr) meta["priors"] = priors_to_json(*priors);

    std::ofstream ms(sidecar_path(csv_path), std::ios::binary);
    if (!ms) {
        throw IoError("cannot open metadata sidecar for writing");
    }
    ms << meta.dump(2) << '\n';
}

SampleSet read_dataset(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dataset file: " + csv_path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "t,p1,p2,p3") {
        throw IoError("dataset header must be exactly 't,p1,p2,p3': " + csv_path.string());
    }
    SampleSet out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        ObservationVector x;
        double fields[4];
        const char* p = line.c_str();
        for (int f = 0; f < 4; ++f) {
            char* end = nullptr;
            fields[f] = std::strtod(p, &end);
            if (end == p) {
                throw IoError("dataset row " + std::to_string(row) + " is malformed");
            }
            p = end;
            if (f < 3) {
                if (*p != ',') {
                    throw IoError("dataset row " + std::to_string(row) + " is malformed");
                }
                ++p;
            }
        }
        x.p1 = fields[1];
        x.p2 = fields[2];
        x.p3 = fields[3];
        out.observations.push_back(x);
        ++row;
    }

    const std::filesystem::path side = sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        std::ifstream ms(side);
        std::ostringstream buf;
        buf << ms.rdbuf();
        json meta;
        try {
            meta = json::parse(buf.str());
        } catch (const json::exception& e) {
            throw IoError(std::string("metadata sidecar is not valid JSON: ") + e.what());
        }
        if (meta.contains("format_version") && meta["format_version"].get<int>() != kFormatVersion) {
            throw ConfigError("dataset format_version mismatch");
        }
        if (meta.contains("seed_policy") && meta["seed_policy"].get<std::string>() != kSeedPolicy) {
            throw ConfigError("dataset seed_policy mismatch");
        }
        if (meta.contains("v_true")) out.meta.v_true = meta["v_true"].get<double>();
        if (meta.contains("seed")) out.meta.seed = meta["seed"].get<std::uint64_t>();
        if (meta.contains("prior_hash")) out.meta.prior_hash = meta["prior_hash"].get<std::string>();
        if (meta.contains("noise_scale")) out.meta.noise_scale = meta["noise_scale"].get<double>();
    }
    return out;
}

void write_audit_csv(std::ostream& os, const std::vector<AuditRow>& rows) {
    os << "v,variant,analytic,fd,abs_err,rel_err,skipped,status\n";
    for (const AuditRow& r : rows) {
        os << format_double(r.v) << ',' << to_string(r.variant) << ',';
        if (r.ok) {
            os << format_double(r.analytic) << ',' << format_double(r.fd) << ','
               << format_double(r.abs_err) << ',' << format_double(r.rel_err) << ',' << r.skipped
               << ",ok\n";
        } else {
            os << ",,,," << r.skipped << ',' << sanitize_csv_field(r.error) << '\n';
        }
    }
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points) {
    os << "v,logl,dlogl_dv,excluded,status\n";
    for (const ScanPoint& p : points) {
        os << format_double(p.v) << ',';
        if (p.ok) {
            os << format_double(p.logl) << ',' << format_double(p.dlogl) << ',' << p.excluded
               << ",ok\n";
        } else {
            os << ",," << p.excluded << ',' << sanitize_csv_field(p.error) << '\n';
        }
    }
}

std::string estimate_to_json(const EstimateResult& result, GradientVariant variant,
                             bool allow_exclusion) {
    json j;
    j["v_hat"] = result.v_hat;
    j["logl_at_vhat"] = result.logl_at_vhat;
    j["grad_at_vhat"] = result.grad_at_vhat;
    j["n_evals"] = result.n_evals;
    j["excluded_samples"] = result.excluded_samples;
    j["bracket"] = json::array({result.bracket.lo, result.bracket.hi});
    j["boundary_bracketed"] = result.boundary_bracketed;
    j["sign_changes"] = result.sign_changes;
    j["gradient"] = to_string(variant);
    j["allow_exclusion"] = allow_exclusion;
    return j.dump(2);
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    char extra = '\0';
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &extra) != 3) {
        throw ConfigError("grid spec must have the form lo:hi:step");
    }
    if (!(step > 0.0) || !(hi >= lo)) {
        throw ConfigError("grid spec requires step > 0 and hi >= lo");
    }
    std::vector<double> grid;
    const double slack = 1e-9 * step;
    for (double v = lo; v <= hi + slack; v += step) {
        grid.push_back(std::min(v, hi));
        if (grid.size() > 1000000) {
            throw ConfigError("grid spec produces too many points");
        }
    }
    return grid;
}

}  // namespace qmix::io
