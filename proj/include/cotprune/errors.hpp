#pragma once

#include <stdexcept>
#include <string>

namespace cotprune {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration: missing template assets, unusable paths, conflicting flags.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A corpus record that cannot become a Sample (missing/empty/non-text field).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mathematically invalid input (positive logprob, empty distribution, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation was applied to a Sample in the wrong status.
class StateError : public Error {
public:
    using Error::Error;
};

/// Data returned by a backend is internally inconsistent (span misalignment,
/// a step region with no token start).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// The endpoint cannot do what was asked (e.g. no per-token logprobs).
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// Transient transport failure that survived the retry budget.
/// `attempts` counts every try made, including the first.
class TransportError : public Error {
public:
    TransportError(const std::string& what, int attempts)
        : Error(what), attempts_(attempts) {}

    int attempts() const { return attempts_; }

private:
    int attempts_ = 1;
};

/// Authentication rejection. Never retried; aborts a run.
class AuthError : public Error {
public:
    using Error::Error;
};

} // namespace cotprune
