#include "qmix/mixing_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qmix {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

[[noreturn]] void throw_status(SampleStatus s) {
    switch (s) {
        case SampleStatus::SingularMixture:
            throw SingularMixtureError("amplitude quadratic is degenerate: r1 == r2 within tolerance");
        case SampleStatus::InvalidObservation:
            throw InvalidObservationError("amplitude roots do not lie strictly in (0,1)");
        case SampleStatus::NotInvertible:
            throw InconsistentObservationError("phase arcsine argument exceeds 1 beyond the clamp tolerance");
        case SampleStatus::NearSingularPhase:
            throw NearSingularPhaseError("|cos delta| is below the singularity tolerance");
        case SampleStatus::OutOfSupport:
            throw OutOfSupportError("value outside the configured support");
        case SampleStatus::Ok:
            break;
    }
    throw Error("unreachable status");
}

struct AmplitudeRoots {
    double r1 = 0.0;
    double r2 = 0.0;
    SampleStatus status = SampleStatus::Ok;
};

AmplitudeRoots try_invert_amplitudes(const ObservationVector& x, double disc_tol) noexcept {
    if (!(x.p1 > 0.0) || !(x.p2 > 0.0) || !(x.p3 >= 0.0 && x.p3 <= 1.0)) {
        return {0.0, 0.0, SampleStatus::InvalidObservation};
    }
    const double sum = 1.0 + x.p1 - x.p2;  // r1^2 + r2^2
    const double disc = sum * sum - 4.0 * x.p1;
    if (!(disc > disc_tol)) {
        return {0.0, 0.0, SampleStatus::SingularMixture};
    }
    const double big = 0.5 * (sum + std::sqrt(disc));
    const double small = x.p1 / big;  // Vieta; avoids cancellation in the small root
    if (!(small > 0.0) || !(big < 1.0) || !(small < big)) {
        return {0.0, 0.0, SampleStatus::InvalidObservation};
    }
    return {std::sqrt(small), std::sqrt(big), SampleStatus::Ok};
}

// Arcsine argument of the phase equation at fixed amplitudes.
double phase_arcsine_arg(double p3, double r1, double r2, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    const double predicted = r1s * (1.0 - r2s) * (1.0 - v * v) + (1.0 - r1s) * r2s * v * v;
    const double denom = 2.0 * r1 * r2 * c1 * c2 * w * v;
    return (predicted - p3) / denom;
}

}  // namespace

const char* to_string(SampleStatus s) noexcept {
    switch (s) {
        case SampleStatus::Ok: return "ok";
        case SampleStatus::SingularMixture: return "singular-mixture";
        case SampleStatus::InvalidObservation: return "invalid-observation";
        case SampleStatus::NotInvertible: return "not-invertible";
        case SampleStatus::NearSingularPhase: return "near-singular-phase";
        case SampleStatus::OutOfSupport: return "out-of-support";
    }
    return "unknown";
}

void SourceVector::validate() const {
    if (!(r1 > 0.0 && r1 < 1.0)) {
        throw PreconditionError("SourceVector.r1 must lie strictly in (0,1)");
    }
    if (!(r2 > 0.0 && r2 < 1.0)) {
        throw PreconditionError("SourceVector.r2 must lie strictly in (0,1)");
    }
    if (!(r1 < r2)) {
        throw PreconditionError("SourceVector requires r1 < r2");
    }
    if (!(delta > -kHalfPi && delta < kHalfPi)) {
        throw PreconditionError("SourceVector.delta must lie strictly in (-pi/2, pi/2)");
    }
}

void ObservationVector::validate() const {
    if (!(p1 > 0.0)) {
        throw PreconditionError("ObservationVector.p1 must be positive");
    }
    if (!(p2 > 0.0)) {
        throw PreconditionError("ObservationVector.p2 must be positive");
    }
    if (!(p3 >= 0.0 && p3 <= 1.0)) {
        throw PreconditionError("ObservationVector.p3 must lie in [0,1]");
    }
    const double sum = 1.0 + p1 - p2;
    const double disc = sum * sum - 4.0 * p1;
    if (!(disc > 0.0)) {
        throw PreconditionError("ObservationVector: amplitude quadratic lacks two distinct real roots");
    }
    const double big = 0.5 * (sum + std::sqrt(disc));
    const double small = p1 / big;
    if (!(small > 0.0 && big < 1.0)) {
        throw PreconditionError("ObservationVector: amplitude roots must lie strictly in (0,1)");
    }
}

void MixingParam::validate() const {
    if (!(v > 0.0 && v < 1.0)) {
        throw PreconditionError("MixingParam.v must lie strictly in (0,1)");
    }
}

ObservationVector forward(const SourceVector& s, MixingParam vp) {
    s.validate();
    vp.validate();
    return detail::forward_raw(s.r1, s.r2, s.delta, vp.v);
}

double jacobian(const SourceVector& s, MixingParam vp) {
    return detail::jacobian_raw(s.r1, s.r2, s.delta, vp.v);
}

Amplitudes invert_amplitudes(const ObservationVector& x) {
    const auto roots = try_invert_amplitudes(x, tol::kDiscriminantDegeneracy);
    if (roots.status != SampleStatus::Ok) {
        throw_status(roots.status);
    }
    return {roots.r1, roots.r2};
}

double invert_phase(const ObservationVector& x, double r1, double r2, MixingParam vp) {
    vp.validate();
    const double q = phase_arcsine_arg(x.p3, r1, r2, vp.v);
    if (!(std::abs(q) <= 1.0 + tol::kArcsinClamp)) {
        throw_status(SampleStatus::NotInvertible);
    }
    return std::asin(std::clamp(q, -1.0, 1.0));
}

SourceVector invert(const ObservationVector& x, MixingParam vp) {
    vp.validate();
    const auto inv = detail::try_invert(x, vp.v);
    if (inv.status != SampleStatus::Ok) {
        throw_status(inv.status);
    }
    return {inv.r1, inv.r2, inv.delta};
}

bool near_singular_phase(double delta, double cos_tol) noexcept {
    return std::abs(std::cos(delta)) < cos_tol;
}

double constraint_residual(double delta, MixingParam vp, const PhaseConstraint& ctx) {
    const ObservationVector x = detail::forward_raw(ctx.r1, ctx.r2, delta, vp.v);
    return x.p3 - ctx.p3;
}

double dconstraint_ddelta(double delta, MixingParam vp, const PhaseConstraint& ctx) {
    const double r1s = ctx.r1 * ctx.r1;
    const double r2s = ctx.r2 * ctx.r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - vp.v * vp.v);
    return -2.0 * ctx.r1 * ctx.r2 * c1 * c2 * w * vp.v * std::cos(delta);
}

double dconstraint_dv(double delta, MixingParam vp, const PhaseConstraint& ctx) {
    const double v = vp.v;
    const double r1s = ctx.r1 * ctx.r1;
    const double r2s = ctx.r2 * ctx.r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    return 2.0 * v * (r2s - r1s)
        - 2.0 * ctx.r1 * ctx.r2 * c1 * c2 * (1.0 - 2.0 * v * v) / w * std::sin(delta);
}

double dphase_dv(const SourceVector& s, MixingParam vp) {
    if (near_singular_phase(s.delta)) {
        throw_status(SampleStatus::NearSingularPhase);
    }
    return detail::dphase_dv_raw(s.r1, s.r2, s.delta, vp.v);
}

double djacobian_dv_partial(const SourceVector& s, MixingParam vp) {
    return detail::djacobian_dv_partial_raw(s.r1, s.r2, s.delta, vp.v);
}

double djacobian_ddelta(const SourceVector& s, MixingParam vp) {
    return detail::djacobian_ddelta_raw(s.r1, s.r2, s.delta, vp.v);
}

double djacobian_dv_total(const SourceVector& s, MixingParam vp) {
    if (near_singular_phase(s.delta)) {
        throw_status(SampleStatus::NearSingularPhase);
    }
    return detail::djacobian_dv_total_raw(s.r1, s.r2, s.delta, vp.v);
}

namespace detail {

Inversion try_invert(const ObservationVector& x, double v,
                     double disc_tol, double clamp_tol) noexcept {
    const auto roots = try_invert_amplitudes(x, disc_tol);
    if (roots.status != SampleStatus::Ok) {
        return {0.0, 0.0, 0.0, roots.status};
    }
    const double q = phase_arcsine_arg(x.p3, roots.r1, roots.r2, v);
    if (!(std::abs(q) <= 1.0 + clamp_tol)) {
        return {roots.r1, roots.r2, 0.0, SampleStatus::NotInvertible};
    }
    return {roots.r1, roots.r2, std::asin(std::clamp(q, -1.0, 1.0)), SampleStatus::Ok};
}

SampleStatus observation_status(const ObservationVector& x, double disc_tol) noexcept {
    return try_invert_amplitudes(x, disc_tol).status;
}

ObservationVector forward_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    ObservationVector x;
    x.p1 = r1s * r2s;
    x.p2 = (1.0 - r1s) * (1.0 - r2s);
    x.p3 = r1s * (1.0 - r2s) * (1.0 - v * v) + (1.0 - r1s) * r2s * v * v
         - 2.0 * r1 * r2 * c1 * c2 * w * v * std::sin(delta);
    return x;
}

double jacobian_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    return 8.0 * r1s * r2s * (r2s - r1s) * c1 * c2 * w * v * std::cos(delta);
}

double dphase_dv_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    const double c = std::cos(delta);
    return (r2s - r1s) / (r1 * r2 * c1 * c2 * w * c)
         - (1.0 - 2.0 * v * v) * std::sin(delta) / ((1.0 - v * v) * v * c);
}

double djacobian_dv_partial_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    return 8.0 * r1s * r2s * (r2s - r1s) * c1 * c2 * (1.0 - 2.0 * v * v) / w * std::cos(delta);
}

double djacobian_ddelta_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    return -8.0 * r1s * r2s * (r2s - r1s) * c1 * c2 * w * v * std::sin(delta);
}

double djacobian_dv_total_raw(double r1, double r2, double delta, double v) noexcept {
    const double r1s = r1 * r1;
    const double r2s = r2 * r2;
    const double c1 = std::sqrt(1.0 - r1s);
    const double c2 = std::sqrt(1.0 - r2s);
    const double w = std::sqrt(1.0 - v * v);
    const double c = std::cos(delta);
    const double gap = r2s - r1s;
    return 8.0 * r1s * r2s * gap * c1 * c2 * (1.0 - 2.0 * v * v) / (w * c)
         - 8.0 * r1 * r2 * gap * gap * v * std::sin(delta) / c;
}

}  // namespace detail

}  // namespace qmix
