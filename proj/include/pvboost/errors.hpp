#pragma once

#include <stdexcept>
#include <string>

namespace pvboost {

/// Base class for all pvboost errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside the modeled region (bad parameter, log/power argument, ...).
struct DomainError : Error {
    using Error::Error;
};

/// No period-Tp orbit of the assumed form exists at these parameters.
/// This is a normal sweep outcome, not a failure.
struct NoOrbitError : Error {
    using Error::Error;
};

/// |Df| = 1 within tolerance: the fixed-point formula degenerates.
struct DegenerateError : Error {
    using Error::Error;
};

/// Operation applied to an orbit of the wrong type.
struct TypeMismatchError : Error {
    using Error::Error;
};

/// The integrator found no threshold crossing within one full period.
struct EventStallError : Error {
    using Error::Error;
};

/// An indicator was asked to compare against an empty front.
struct EmptyFrontError : Error {
    using Error::Error;
};

/// A hypervolume front point does not dominate the reference point.
struct RefPointError : Error {
    using Error::Error;
};

/// Invalid runtime configuration (CLI flags, EA settings, JSON documents).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace pvboost
