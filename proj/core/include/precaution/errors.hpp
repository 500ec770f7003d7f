#pragma once

#include <stdexcept>
#include <string>

namespace precaution {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input (bad probabilities, ragged matrices, ...). The message
/// names the offending row/column where one exists.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ZeroMarginal : public Error {
 public:
  using Error::Error;
};

class PriorMismatch : public Error {
 public:
  using Error::Error;
};

class StateMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleFirstDecision : public Error {
 public:
  using Error::Error;
};

/// A model parameter or evaluation point lies outside the domain of a
/// catalog function (e.g. log of a non-positive number).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// The star-difference has no element, so the decomposition certificate
/// does not apply. Not a refutation of convexity.
class EmptyStarDifference : public Error {
 public:
  using Error::Error;
};

/// The first-order certificate could not be established for this
/// family/parameter combination. Not a refutation of the precautionary effect.
class NoCertificate : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; `pointer()` is the JSON pointer of the offending node.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace precaution
