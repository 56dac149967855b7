#pragma once

#include <stdexcept>
#include <string>

namespace schureq {

/// Base class for domain errors raised by the model machinery. Precondition
/// violations (bad arguments, malformed input files) use the std exceptions.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An equilibrium level cannot be built because the mean of the previous
/// level vanishes. `level()` is the first order that does not exist.
class ZeroMeanError : public ModelError {
public:
    explicit ZeroMeanError(unsigned level)
        : ModelError("equilibrium level " + std::to_string(level) +
                     " does not exist: mean of level " + std::to_string(level - 1) + " is zero"),
          level_(level) {}

    unsigned level() const noexcept { return level_; }

private:
    unsigned level_;
};

/// A truncated expansion or summation could not reach the requested
/// tolerance within the configured truncation ceiling.
class NonConvergentError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Correlation requested for a degenerate marginal.
class ZeroVarianceError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Dimension outside the supported/published range.
class UnsupportedDimensionError : public ModelError {
public:
    using ModelError::ModelError;
};

}  // namespace schureq
