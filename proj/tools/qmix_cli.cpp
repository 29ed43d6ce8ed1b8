// Command-line front end: generate | estimate | check-gradient | scan | version.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qmix/io.hpp"

namespace {

enum ExitCode {
    kOk = 0,
    kUsageOrIo = 1,
    kBadConfig = 2,
    kNoInteriorMaximum = 3,
    kEvaluationFailed = 4,
};

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("QMIX_LOG");
        if (env == nullptr) return 1;
        const std::string s(env);
        if (s == "quiet") return 0;
        if (s == "info") return 2;
        if (s == "debug") return 3;
        return 1;  // warn
    }();
    return level;
}

void warn(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "warning: " << msg << '\n';
}

void info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "info: " << msg << '\n';
}

struct CommonArgs {
    std::string config_path;
    std::string dataset_path;
    std::string out_path;
    std::string grid_spec;
    std::string gradient = "total";
    bool allow_exclusion = false;
    std::optional<std::uint64_t> seed_override;
};

qmix::GradientVariant parse_variant(const std::string& name) {
    if (name == "total") return qmix::GradientVariant::Total;
    if (name == "partial-only") return qmix::GradientVariant::PartialOnly;
    throw qmix::ConfigError("--gradient must be 'total' or 'partial-only'");
}

// Grid points outside (0,1) cannot be evaluated; drop them with a warning.
std::vector<double> usable_grid(const std::vector<double>& raw) {
    std::vector<double> grid;
    for (const double v : raw) {
        if (v > 0.0 && v < 1.0) {
            grid.push_back(v);
        } else {
            warn("dropping grid point " + qmix::io::format_double(v) + " outside (0,1)");
        }
    }
    return grid;
}

std::vector<double> grid_from(const CommonArgs& args) {
    if (args.grid_spec.empty()) {
        return qmix::default_audit_grid();
    }
    return usable_grid(qmix::io::parse_grid(args.grid_spec));
}

int cmd_generate(const CommonArgs& args) {
    const qmix::io::RunConfig cfg = qmix::io::load_config(args.config_path);
    const std::uint64_t seed = args.seed_override.value_or(cfg.generate.seed);
    const qmix::SampleSet data =
        qmix::generate(cfg.priors, qmix::MixingParam{cfg.generate.v_true}, cfg.generate.n, seed);
    qmix::io::write_dataset(data, args.out_path, &cfg.priors);
    info("wrote " + std::to_string(data.size()) + " samples to " + args.out_path);
    return kOk;
}

int cmd_estimate(const CommonArgs& args) {
    const qmix::io::RunConfig cfg = qmix::io::load_config(args.config_path);
    qmix::SampleSet data = qmix::io::read_dataset(args.dataset_path);
    data.validate();
    if (data.meta.prior_hash && *data.meta.prior_hash != qmix::io::prior_hash_hex(cfg.priors)) {
        warn("dataset was generated under a different prior configuration");
    }
    qmix::SearchOptions opts = cfg.search;
    opts.variant = parse_variant(args.gradient);
    if (args.allow_exclusion) {
        opts.allow_exclusion = true;
    }
    const qmix::EstimateResult result = qmix::estimate_v(data, cfg.priors, opts);
    std::cout << qmix::io::estimate_to_json(result, opts.variant, opts.allow_exclusion) << '\n';
    return result.boundary_bracketed ? kNoInteriorMaximum : kOk;
}

int cmd_check_gradient(const CommonArgs& args) {
    const qmix::io::RunConfig cfg = qmix::io::load_config(args.config_path);
    qmix::SampleSet data = qmix::io::read_dataset(args.dataset_path);
    data.validate();
    const std::vector<double> grid = grid_from(args);
    std::vector<qmix::AuditRow> rows;
    if (grid.empty()) {
        warn("grid contains no usable points; emitting header only");
    } else {
        qmix::AuditOptions opts;
        opts.h = cfg.tolerances.fd_step;
        opts.cos_guard = cfg.tolerances.audit_cos_guard;
        opts.rel_floor = cfg.tolerances.rel_floor;
        rows = qmix::gradient_audit(data, cfg.priors, grid, opts);
    }
    if (args.out_path.empty()) {
        qmix::io::write_audit_csv(std::cout, rows);
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) {
            throw qmix::IoError("cannot open output file: " + args.out_path);
        }
        qmix::io::write_audit_csv(out, rows);
    }
    return kOk;
}

int cmd_scan(const CommonArgs& args) {
    const qmix::io::RunConfig cfg = qmix::io::load_config(args.config_path);
    qmix::SampleSet data = qmix::io::read_dataset(args.dataset_path);
    data.validate();
    const std::vector<double> grid = grid_from(args);
    std::vector<qmix::ScanPoint> points;
    if (grid.empty()) {
        warn("grid contains no usable points; emitting header only");
    } else {
        qmix::ScanOptions opts;
        opts.allow_exclusion = args.allow_exclusion || cfg.search.allow_exclusion;
        opts.variant = parse_variant(args.gradient);
        points = qmix::scan(data, cfg.priors, grid, opts);
    }
    if (args.out_path.empty()) {
        qmix::io::write_scan_csv(std::cout, points);
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) {
            throw qmix::IoError("cannot open output file: " + args.out_path);
        }
        qmix::io::write_scan_csv(out, points);
    }
    return kOk;
}

int dispatch(int (*handler)(const CommonArgs&), const CommonArgs& args) {
    try {
        return handler(args);
    } catch (const qmix::NoInteriorMaximumError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNoInteriorMaximum;
    } catch (const qmix::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const qmix::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageOrIo;
    } catch (const qmix::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEvaluationFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageOrIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupling-parameter estimation for the two-qubit nonlinear mixture"};
    app.require_subcommand(1);

    CommonArgs args;

    CLI::App* generate = app.add_subcommand("generate", "Draw a synthetic dataset");
    generate->add_option("--config", args.config_path, "JSON configuration file")->required();
    generate->add_option("--out", args.out_path, "Output dataset CSV")->required();
    generate->add_option("--seed", args.seed_override, "Override the config seed");

    CLI::App* estimate = app.add_subcommand("estimate", "Maximum-likelihood coupling estimate");
    estimate->add_option("dataset", args.dataset_path, "Dataset CSV")->required();
    estimate->add_option("--config", args.config_path, "JSON configuration file")->required();
    estimate->add_option("--gradient", args.gradient, "Gradient variant: total | partial-only");
    estimate->add_flag("--allow-exclusion", args.allow_exclusion,
                       "Skip samples that fail at the queried coupling (counted)");

    CLI::App* check = app.add_subcommand("check-gradient",
                                         "Audit analytic gradients against finite differences");
    check->add_option("dataset", args.dataset_path, "Dataset CSV")->required();
    check->add_option("--config", args.config_path, "JSON configuration file")->required();
    check->add_option("--grid", args.grid_spec, "Grid spec lo:hi:step (default audit grid)");
    check->add_option("--out", args.out_path, "Output CSV (default: stdout)");

    CLI::App* scan_cmd = app.add_subcommand("scan", "Likelihood and gradient over a grid");
    scan_cmd->add_option("dataset", args.dataset_path, "Dataset CSV")->required();
    scan_cmd->add_option("--config", args.config_path, "JSON configuration file")->required();
    scan_cmd->add_option("--grid", args.grid_spec, "Grid spec lo:hi:step (default audit grid)");
    scan_cmd->add_option("--gradient", args.gradient, "Gradient variant: total | partial-only");
    scan_cmd->add_flag("--allow-exclusion", args.allow_exclusion,
                       "Skip samples that fail at the queried coupling (counted)");
    scan_cmd->add_option("--out", args.out_path, "Output CSV (default: stdout)");

    CLI::App* version = app.add_subcommand("version", "Print version information");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsageOrIo;
    }

    if (version->parsed()) {
        std::cout << "qmix " << qmix::io::kToolVersion << " (dataset format v"
                  << qmix::io::kFormatVersion << ")\n";
        return kOk;
    }
    if (generate->parsed()) return dispatch(cmd_generate, args);
    if (estimate->parsed()) return dispatch(cmd_estimate, args);
    if (check->parsed()) return dispatch(cmd_check_gradient, args);
    if (scan_cmd->parsed()) return dispatch(cmd_scan, args);
    return kUsageOrIo;
}
