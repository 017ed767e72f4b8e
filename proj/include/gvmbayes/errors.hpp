#pragma once

#include <stdexcept>
#include <string>

namespace gvm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (range, sign, domain).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// The requested evaluation would overflow double precision.
class OverflowRisk : public Error {
public:
    using Error::Error;
};

// A series, iteration or optimizer failed to settle within its cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// A Monte Carlo estimate had no contributing draws.
class DegenerateEstimate : public Error {
public:
    using Error::Error;
};

// The operation is only defined for a sub-case of the inputs.
class UnsupportedCase : public Error {
public:
    using Error::Error;
};

// The prior family does not fit the requested test.
class PriorMismatch : public Error {
public:
    using Error::Error;
};

// A rejection sampler hit its consecutive-rejection cap.
class IterationCap : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class UnknownCase : public Error {
public:
    using Error::Error;
};

// Malformed text input (CSV rows, records, config values).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gvm
