#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

/// Evaluation outside a field model's domain (e.g. the axis singularity).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A materialized exponential left the finite double range.
struct OverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scheme initialization rejected (violated precondition on initial data).
struct InitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad command line / config input. Maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be opened or written. Maps to exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive solver drove the step below the configured minimum.
struct StepSizeUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive solver exceeded its step budget.
struct MaxStepsExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cpd
