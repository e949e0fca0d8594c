#pragma once

#include <stdexcept>
#include <string>

namespace llrk {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A linear solve hit a pivot below the singularity threshold.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

/// The Pade denominator matrix is numerically singular for the
/// requested (p,q)/argument combination.
class SingularDenominator : public Error {
public:
    using Error::Error;
};

/// A vector field, Jacobian or time-derivative evaluation produced
/// a non-finite value.
class NonFiniteField : public Error {
public:
    using Error::Error;
};

class UnknownExample : public Error {
public:
    using Error::Error;
};

class UnknownTableau : public Error {
public:
    using Error::Error;
};

/// Wraps a stepper error together with the index of the failing step.
class StepFailure : public Error {
public:
    StepFailure(const std::string& what, std::size_t step_index)
        : Error(what), step_index(step_index) {}
    std::size_t step_index;
};

/// The initial bisection bracket does not straddle the separatrix.
class SameBasin : public Error {
public:
    using Error::Error;
};

/// A trajectory could not be assigned to any attractor.
class UndecidedTrajectory : public Error {
public:
    using Error::Error;
};

/// Successive intercept differences are too small for a meaningful
/// order estimate.
class DegenerateDifferences : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The reference integrator hit its refinement cap before its
/// self-check converged.
class ReferenceUnconverged : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace llrk
