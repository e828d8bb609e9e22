#pragma once

#include <stdexcept>
#include <string>

namespace besq {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied a NaN/inf or an argument outside the function's domain.
class NonFinite : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedOrder : public Error {
public:
    using Error::Error;
};

/// A linear-scale value was requested that does not fit in a double.
class Overflow : public Error {
public:
    using Error::Error;
};

/// Parameters fall outside the hypotheses under which a law holds.
class RegimeViolation : public Error {
public:
    using Error::Error;
};

class OrientationError : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class OdeFailure : public Error {
public:
    using Error::Error;
};

/// Numerical inversion could not produce a trustworthy value.
class Unstable : public Error {
public:
    using Error::Error;
};

class DegenerateConditioning : public Error {
public:
    using Error::Error;
};

/// More than half of the simulated paths hit the time horizon first.
class CensoredMajority : public Error {
public:
    using Error::Error;
};

class RngFailure : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace besq
