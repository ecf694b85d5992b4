#pragma once

#include <stdexcept>
#include <string>

namespace tmep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible dimensions or factorizations.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A function requiring a strictly positive spectrum was applied to a
/// singular state.
class FaithfulnessError : public Error {
 public:
  FaithfulnessError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class EigensolverError : public Error {
 public:
  using Error::Error;
};

/// Probabilities that only sum to one after a suspiciously large correction.
class NumericalIntegrityError : public Error {
 public:
  using Error::Error;
};

/// An atom of one measure has no counterpart in the dominating measure.
class AbsoluteContinuityError : public Error {
 public:
  AbsoluteContinuityError(const std::string& what, double location)
      : Error(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Requested Hilbert space exceeds the configured dimension cap.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, long required)
      : Error(what), required_(required) {}
  long required_dimension() const noexcept { return required_; }

 private:
  long required_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmep
