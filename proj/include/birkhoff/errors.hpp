#pragma once

#include <stdexcept>
#include <string>

namespace birkhoff {

// Base class for every domain-level failure; CLI maps these to exit code 1.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A swap would drive a cell of the dataset (or of a running statistic) negative.
struct NegativeCellError : DomainError {
    using DomainError::DomainError;
};

// A requested swap does not apply: a result vote would be invalid.
struct NotApplicableError : DomainError {
    using DomainError::DomainError;
};

// An operation's entry conditions are not met (wrong dataset kind, missing cell, ...).
struct PreconditionError : DomainError {
    using DomainError::DomainError;
};

// A chain of swaps exceeded its step or search budget.
struct NonterminationError : DomainError {
    using DomainError::DomainError;
};

// Two datasets do not share a sufficient statistic.
struct FiberMismatchError : DomainError {
    using DomainError::DomainError;
};

// Inputs have incompatible dimensions.
struct CompatibilityError : DomainError {
    using DomainError::DomainError;
};

// The requested enumeration is too large to materialize.
struct TooLargeError : DomainError {
    using DomainError::DomainError;
};

// Parameters outside the supported range of an algorithm.
struct UnsupportedError : DomainError {
    using DomainError::DomainError;
};

// An iterative fit failed to reach its tolerance within the budget.
struct NonconvergenceError : DomainError {
    using DomainError::DomainError;
};

// An exact integer computation would overflow.
struct OverflowError : DomainError {
    using DomainError::DomainError;
};

// Malformed textual or JSON input.
struct ParseError : DomainError {
    using DomainError::DomainError;
};

}  // namespace birkhoff
