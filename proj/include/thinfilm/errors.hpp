#pragma once

#include <stdexcept>
#include <string>

namespace thinfilm {

// Error vocabulary for the whole library.
//
// DomainError:    the request itself is invalid (wrong regime, bad parameters,
//                 malformed input). CLI maps these to exit code 1.
// NumericalError: a well-posed computation failed to converge or produced
//                 non-finite values. CLI maps these to exit code 2.

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration / input parsing.
struct ConfigError : DomainError {
    using DomainError::DomainError;
};

// Steady-state construction.
struct MassCritical : DomainError {
    using DomainError::DomainError;
};
struct BracketFailure : NumericalError {
    using NumericalError::NumericalError;
};

// Quadrature.
struct QuadratureFailure : NumericalError {
    using NumericalError::NumericalError;
};

// Field diagnostics.
struct EmptySupport : DomainError {
    using DomainError::DomainError;
};
struct DegenerateField : DomainError {
    using DomainError::DomainError;
};

// Sharp-constant machinery.
struct NotSupercritical : DomainError {
    using DomainError::DomainError;
};
struct EnergyTooHigh : DomainError {
    using DomainError::DomainError;
};
struct DegenerateScaling : DomainError {
    using DomainError::DomainError;
};

// Evolution.
struct NewtonDiverged : NumericalError {
    using NumericalError::NumericalError;
};
struct NumericalFailure : NumericalError {
    using NumericalError::NumericalError;
};
struct GridTooSmall : DomainError {
    using DomainError::DomainError;
};

// Classification.
struct InsufficientDecay : DomainError {
    using DomainError::DomainError;
};

} // namespace thinfilm
