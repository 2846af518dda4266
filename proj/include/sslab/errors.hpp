#pragma once

#include <stdexcept>
#include <string>

namespace sslab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A cell or string level that does not fit the blow-up prefix.
class LevelMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation of the projective map at its indeterminacy point.
class IndeterminacyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace sslab
