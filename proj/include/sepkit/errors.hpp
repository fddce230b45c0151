#pragma once

#include <stdexcept>
#include <string>

namespace sepkit {

/// Base class for every computation error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A gamma/Pochhammer argument (or a lower hypergeometric parameter) hit a
/// nonpositive integer.
class PoleError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Not enough certified digits to isolate a unique rational.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Raised by ansatz fitting and recurrence validation when exact data refuse
/// to fit.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Bad command-line input detected after parsing (exit code 2).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace sepkit
