#pragma once

#include <stdexcept>
#include <string>

namespace contestlab {

// Invalid input to an operation (bad sizes, empty grids, unknown columns).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the mathematical domain of a function (negative effort,
// remaining score out of range, zero-variance density).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure inside an estimator (rank deficiency, empty sample, all rows trimmed).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed panel CSV or config document.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row = -1, long column = -1)
      : std::runtime_error(what), row_(row), column_(column) {}
  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

 private:
  long row_;
  long column_;
};

}  // namespace contestlab
