#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmix {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A type invariant or operation precondition was violated; the message names
// the offending field.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// The amplitude quadratic is degenerate (r1 == r2 within tolerance), so the
// mixing Jacobian vanishes and the observation cannot be separated.
class SingularMixtureError : public Error {
public:
    using Error::Error;
};

// The observation does not correspond to any valid source pair (amplitude
// roots fall outside (0,1) or are complex).
class InvalidObservationError : public Error {
public:
    using Error::Error;
};

// The phase equation has no solution at the queried coupling value: the
// arcsine argument exceeds 1 by more than the clamp tolerance.
class InconsistentObservationError : public Error {
public:
    using Error::Error;
};

// |cos delta| is below the singularity tolerance; phase-sensitivity
// derivatives are undefined here.
class NearSingularPhaseError : public Error {
public:
    using Error::Error;
};

// Density or score queried outside the configured support.
class OutOfSupportError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A per-sample failure during a likelihood evaluation. Carries the index of
// the first failing sample and the cause.
class EvaluationError : public Error {
public:
    EvaluationError(std::size_t sample_index, const std::string& cause)
        : Error("sample " + std::to_string(sample_index) + ": " + cause),
          sample_index_(sample_index),
          cause_(cause) {}

    explicit EvaluationError(const std::string& what)
        : Error(what), sample_index_(static_cast<std::size_t>(-1)), cause_(what) {}

    std::size_t sample_index() const noexcept { return sample_index_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::size_t sample_index_;
    std::string cause_;
};

// Every point of a scan grid failed to evaluate.
class ScanError : public Error {
public:
    using Error::Error;
};

// The search domain contains no interior maximum and no evaluable boundary
// candidate. Carries the best boundary value seen, NaN if none evaluated.
class NoInteriorMaximumError : public Error {
public:
    NoInteriorMaximumError(const std::string& what, double boundary_best_v)
        : Error(what), boundary_best_v_(boundary_best_v) {}

    double boundary_best_v() const noexcept { return boundary_best_v_; }

private:
    double boundary_best_v_;
};

// A perturbation invalidated every sample.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

// A finite-difference stencil would leave the valid domain; the caller should
// shrink the step.
class DomainTooTightError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace qmix
