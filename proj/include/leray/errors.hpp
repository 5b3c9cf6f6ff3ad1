#pragma once

#include <stdexcept>
#include <string>

namespace leray {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration document or option set (bad field, unknown key).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Numeric argument outside its admissible domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Field shapes or grids do not match.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// File does not carry the expected format signature.
class FormatError : public Error {
  public:
    using Error::Error;
};

/// File is recognized but internally inconsistent (truncated, size mismatch).
class CorruptFileError : public Error {
  public:
    using Error::Error;
};

/// Data violates a value-level invariant (non-finite entries, bad ordering).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Index outside the valid range of an operation.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Not enough samples to evaluate the requested quantity.
class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

/// Regression design matrix is singular (e.g. zero predictor variance).
class DegenerateDesignError : public Error {
  public:
    using Error::Error;
};

/// A reference quantity needed for normalization is identically zero.
class UndefinedReferenceError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values appeared during time integration. Carries the
/// simulation time at which the first non-finite value was detected.
class BlowUpError : public Error {
  public:
    explicit BlowUpError(double time)
        : Error("solution blew up at t = " + std::to_string(time)), time_(time) {}
    double time() const { return time_; }

  private:
    double time_;
};

} // namespace leray
