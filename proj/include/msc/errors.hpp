#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msc {

/// Base of every error caused by bad caller input (CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatchError : public InputError {
 public:
  using InputError::InputError;
};

/// Raised when a classifier with ‖w‖ = 0 is asked for distances or prices.
class DegenerateClassifierError : public InputError {
 public:
  using InputError::InputError;
};

class InfeasibleResponseError : public InputError {
 public:
  using InputError::InputError;
};

class UndefinedInequalityError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyMarketError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Dataset file problems. `row()` is the 1-based data row (0 for the header).
class DatasetError : public InputError {
 public:
  DatasetError(const std::string& what, std::size_t row)
      : InputError(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class ParseError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class InvariantViolation : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

}  // namespace msc
