#pragma once

#include <stdexcept>
#include <string>

namespace qsu2 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// An operator or state was requested on a truncation too small to hold
/// any vector on which it acts exactly.
class EmptySafeShell : public Error {
public:
    using Error::Error;
};

/// Thrown when the generator operators fail the defining-relation battery.
class ValidationFailure : public Error {
public:
    ValidationFailure(std::string identity, double residual)
        : Error("relation '" + identity + "' violated, residual " + std::to_string(residual)),
          identity_(std::move(identity)), residual_(residual)
    {
    }
    const std::string& identity() const noexcept { return identity_; }
    double residual() const noexcept { return residual_; }

private:
    std::string identity_;
    double residual_;
};

class LevelOverflow : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double last_estimate)
        : Error(what), last_estimate_(last_estimate)
    {
    }
    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

class PeakOutsideTruncation : public Error {
public:
    using Error::Error;
};

class TailTooLarge : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace qsu2
