#pragma once

#include "qmix/errors.hpp"
#include "qmix/tolerances.hpp"

namespace qmix {

// Latent sources of the two-qubit mixture: the state amplitudes r1 < r2 and
// the relative phase delta. The canonical branch keeps delta in
// (-pi/2, pi/2), so cos(delta) > 0 and the mixing Jacobian stays positive.
struct SourceVector {
    double r1 = 0.0;
    double r2 = 0.0;
    double delta = 0.0;

    void validate() const;  // throws PreconditionError naming the bad field
};

// Measured outcome probabilities (p1, p2, p3) produced by the mixture.
struct ObservationVector {
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;

    void validate() const;
};

// The scalar coupling strength of the mixture, in (0, 1). Both v and
// sqrt(1 - v^2) appear as factors throughout, so the endpoints are rejected
// rather than clamped.
struct MixingParam {
    double v = 0.0;

    void validate() const;
};

enum class SampleStatus : unsigned char {
    Ok = 0,
    SingularMixture,    // amplitude quadratic degenerate (r1 == r2)
    InvalidObservation, // amplitude roots not in (0,1)
    NotInvertible,      // phase arcsine argument beyond the clamp tolerance
    NearSingularPhase,  // |cos delta| below the active guard
    OutOfSupport,       // reconstructed source outside the prior support
};

const char* to_string(SampleStatus s) noexcept;

// Forward mixture: observation probabilities from sources and coupling.
// Inputs are validated; outputs satisfy the ObservationVector invariants.
ObservationVector forward(const SourceVector& s, MixingParam vp);

// Determinant of the source-to-observation map at s. Strictly positive on
// the canonical domain. No input validation: tests probe it at deliberately
// degenerate points, where it vanishes.
double jacobian(const SourceVector& s, MixingParam vp);

struct Amplitudes {
    double r1 = 0.0;
    double r2 = 0.0;
};

// Recover the amplitudes from (p1, p2). r1^2 and r2^2 are the two roots of
// t^2 - (1 + p1 - p2) t + p1 = 0; the smaller root goes to r1, which fixes
// the permutation ambiguity. Independent of the coupling parameter.
Amplitudes invert_amplitudes(const ObservationVector& x);

// Recover the phase from p3 given the amplitudes and coupling. Returns the
// principal arcsine branch in [-pi/2, pi/2]; an argument within
// tol::kArcsinClamp above 1 is clamped, anything larger throws
// InconsistentObservationError.
double invert_phase(const ObservationVector& x, double r1, double r2, MixingParam vp);

// Full source restoration: amplitudes then phase.
SourceVector invert(const ObservationVector& x, MixingParam vp);

bool near_singular_phase(double delta, double cos_tol = tol::kNearSingularCos) noexcept;

// The phase equation with amplitudes and observed p3 held fixed, written as
// residual(delta, v) = predicted_p3(delta, v) - p3. Its two partial
// derivatives below drive the implicit sensitivity of the phase to the
// coupling.
struct PhaseConstraint {
    double r1 = 0.0;
    double r2 = 0.0;
    double p3 = 0.0;
};

double constraint_residual(double delta, MixingParam vp, const PhaseConstraint& ctx);
double dconstraint_ddelta(double delta, MixingParam vp, const PhaseConstraint& ctx);
double dconstraint_dv(double delta, MixingParam vp, const PhaseConstraint& ctx);

// d(delta)/dv with the observation held fixed: how the reconstructed phase
// moves when the assumed coupling changes. The amplitudes carry no such
// dependency, so this is the only nonzero source sensitivity.
// Throws NearSingularPhaseError when |cos delta| < tol::kNearSingularCos.
double dphase_dv(const SourceVector& s, MixingParam vp);

// Partial derivative of the Jacobian with respect to the coupling, sources
// held fixed.
double djacobian_dv_partial(const SourceVector& s, MixingParam vp);

// Partial derivative of the Jacobian with respect to the phase.
double djacobian_ddelta(const SourceVector& s, MixingParam vp);

// Total derivative of the Jacobian along v with the observation held fixed:
// the direct v-dependence plus the indirect one through the reconstructed
// phase. Equals djacobian_dv_partial + djacobian_ddelta * dphase_dv.
double djacobian_dv_total(const SourceVector& s, MixingParam vp);

namespace detail {

// Non-throwing core shared with the data-parallel likelihood kernels.

struct Inversion {
    double r1 = 0.0;
    double r2 = 0.0;
    double delta = 0.0;
    SampleStatus status = SampleStatus::Ok;
};

Inversion try_invert(const ObservationVector& x, double v,
                     double disc_tol = tol::kDiscriminantDegeneracy,
                     double clamp_tol = tol::kArcsinClamp) noexcept;

SampleStatus observation_status(const ObservationVector& x,
                                double disc_tol = tol::kDiscriminantDegeneracy) noexcept;

ObservationVector forward_raw(double r1, double r2, double delta, double v) noexcept;
double jacobian_raw(double r1, double r2, double delta, double v) noexcept;
double dphase_dv_raw(double r1, double r2, double delta, double v) noexcept;
double djacobian_dv_partial_raw(double r1, double r2, double delta, double v) noexcept;
double djacobian_ddelta_raw(double r1, double r2, double delta, double v) noexcept;
double djacobian_dv_total_raw(double r1, double r2, double delta, double v) noexcept;

}  // namespace detail

}  // namespace qmix
