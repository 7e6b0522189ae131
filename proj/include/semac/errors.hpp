#pragma once

#include <stdexcept>
#include <string>

namespace semac {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Enumeration would exceed the configured combination cap.
struct CombinatorialOverflowError : Error {
    using Error::Error;
};

/// A channel coefficient is too small to invert.
struct DeepFadeError : Error {
    using Error::Error;
};

/// Requested problem has no feasible point; message names the witness.
struct InfeasibleError : Error {
    using Error::Error;
};

/// Gaussian randomization produced no feasible candidate within the scale cap.
struct RandomizationFailureError : Error {
    using Error::Error;
};

/// f_max == f_min, so the NMSE normalization is undefined.
struct DegenerateRangeError : Error {
    using Error::Error;
};

/// Malformed problem construction (dimension mismatch, bad parameter).
struct ConstructionError : Error {
    using Error::Error;
};

/// Configuration file parse or validation failure; message carries path and field.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace semac
