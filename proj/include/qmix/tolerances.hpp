#pragma once

namespace qmix::tol {

// Absolute tolerance on the discriminant of the amplitude quadratic; below it
// the two amplitudes are treated as equal and the mixture as singular.
inline constexpr double kDiscriminantDegeneracy = 1e-12;

// Arcsine arguments in (1, 1 + kArcsinClamp] are treated as rounding noise
// and clamped to 1; larger overshoot is a genuine inconsistency.
inline constexpr double kArcsinClamp = 1e-9;

// |cos delta| below this is a phase singularity for the derivative formulas.
inline constexpr double kNearSingularCos = 1e-8;

// Default central-difference step for likelihood-level checks.
inline constexpr double kFdStep = 1e-5;

// Floor for the denominator of relative errors.
inline constexpr double kRelErrFloor = 1e-12;

}  // namespace qmix::tol
