#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace typicality {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is the 1-based file line, 0 when unknown.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid data (duplicate ids, bad grouping, unknown labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A vector's length does not match the model or dataset dimension.
class DimensionError : public Error {
 public:
  DimensionError(std::size_t expected, std::size_t actual);
};

/// Training could not proceed (too few samples, bad hyperparameters).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public TrainingError {
 public:
  ConvergenceError(const std::string& what, double residual);
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Model file is unreadable, truncated, of the wrong kind, or of another version.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace typicality
