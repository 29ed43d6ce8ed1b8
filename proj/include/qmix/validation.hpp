#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qmix/likelihood.hpp"

namespace qmix {

// Central difference (f(x+h) - f(x-h)) / 2h.
template <class F>
double central_diff(F&& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// One Richardson step combining steps h and h/2; cancels the leading h^2
// truncation term.
template <class F>
double central_diff_richardson(F&& f, double x, double h) {
    const double coarse = central_diff(f, x, h);
    const double fine = central_diff(f, x, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

using Map3 = std::function<std::array<double, 3>(const std::array<double, 3>&)>;

// Determinant of the 3x3 central-difference derivative matrix of f at the
// given point.
double fd_det3(const Map3& f, const std::array<double, 3>& at, double h);

// Finite-difference determinant of the forward mixture with respect to the
// sources; the non-analytic cross-check for jacobian(). Throws
// DomainTooTightError when a stencil point leaves the valid domain.
double fd_jacobian_det(const SourceVector& s, MixingParam v, double h = 1e-6);

// Adaptive Simpson quadrature to the requested absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10);

struct AuditOptions {
    double h = tol::kFdStep;

    // Evaluability guard across the difference stencil. Samples closer to the
    // phase singularity than this inflate the truncation error of the
    // difference quotient far beyond the comparison tolerance, so the audit
    // pins the subset that is comfortably evaluable at v-h, v and v+h.
    double cos_guard = 0.05;

    double rel_floor = tol::kRelErrFloor;
    bool richardson = false;
    bool parallel = true;
};

struct AuditRow {
    double v = 0.0;
    GradientVariant variant = GradientVariant::Total;
    double analytic = 0.0;
    double fd = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    std::size_t skipped = 0;  // samples excluded from the pinned subset
    bool ok = false;
    std::string error;  // nonempty when !ok
};

// Verification grid 0.10 .. 0.90 in steps of 0.05, minus the neighborhood of
// 1/sqrt(2): there the coupling-only factor of the gradient vanishes, the
// derivative can cross zero, and relative comparison against the difference
// quotient degenerates.
std::vector<double> default_audit_grid();

// For each grid point, compare both analytic gradient variants against the
// central difference of the log-likelihood over the same pinned sample
// subset. Per-point failures are recorded in the rows, never thrown.
std::vector<AuditRow> gradient_audit(const SampleSet& data, const PriorConfig& cfg,
                                     std::span<const double> grid,
                                     const AuditOptions& opts = {});

}  // namespace qmix
