// Error types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tact {

// Bad arguments or malformed inputs (non-finite positions, empty batches, ...).
using InvalidInput = std::invalid_argument;

// A chain produced a non-finite value. Carries the index of the offending step.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("divergence at step " + std::to_string(step) + ": " + what),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// The tempering variable escaped the well by more than one reflection can fix.
class StepTooLargeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested operation is not defined for this target (e.g. normalized density
// of a logistic posterior).
class UnsupportedTargetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Diagnostic asked on a trace too short (or too degenerate) to say anything.
class InsufficientDataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Autocorrelation of a constant sequence (zero variance).
class UndefinedAutocorrelationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config file / flag parsing failure; message names the offending key.
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tact
