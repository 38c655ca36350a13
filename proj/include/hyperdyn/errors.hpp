#pragma once

#include <stdexcept>
#include <string>

namespace hyperdyn {

/// Base class for every error raised by the library. The CLI maps each
/// subclass onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

/// Malformed input document (missing field, wrong type).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid Schottky geometry: overlapping disks, non-contracting generators,
/// non-loxodromic elements.
class GeometryError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// Evaluation outside a map's domain (pole, inadmissible point or word).
class EvaluationError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A requested size exceeds the configured resource cap.
class BudgetError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// A statistical estimate could not be resolved above its noise floor.
class IndeterminateError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

}  // namespace hyperdyn
