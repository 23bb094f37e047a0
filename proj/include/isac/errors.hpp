#pragma once

#include <stdexcept>
#include <string>

namespace isac {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a model precondition (dimensions, ranges, empty sets).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A numerical kernel could not produce a trustworthy result.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Rank-one or Schur-complement update hit a (near) zero denominator.
class SingularUpdateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Combinatorial search would exceed the configured enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace isac
