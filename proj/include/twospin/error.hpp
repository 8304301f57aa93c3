#pragma once

#include <stdexcept>
#include <string>

namespace twospin {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Negative edge weights, non-positive fields, or a system of the wrong class.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function (e.g. potential at 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A required uniqueness condition does not hold. `degree()` names the
/// first degree at which |f_d'(x_d)| >= 1, or 0 when no single degree is at fault.
class PreconditionError : public Error {
public:
    PreconditionError(const std::string& what, int degree = 0)
        : Error(what), degree_(degree) {}
    int degree() const noexcept { return degree_; }

private:
    int degree_;
};

/// The requested threshold does not exist (e.g. hardcore with gamma <= 1 and no degree bound).
class NoThreshold : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Malformed graph input. The message carries the line or field path.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Caller broke an API contract (e.g. expanding a fixed SAW leaf).
class ContractViolation : public Error {
public:
    using Error::Error;
};

}  // namespace twospin
