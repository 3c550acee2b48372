#pragma once

#include <stdexcept>
#include <string>

namespace hrstat {

// Common base so callers can catch everything thrown by this library with
// one handler while std::exception-based code keeps working.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// An API precondition was violated (bad argument, inconsistent sizes, ...).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& msg) : Error(msg) {}
};

class DimensionError : public ContractViolation {
 public:
  explicit DimensionError(const std::string& msg) : ContractViolation(msg) {}
};

// A matrix required to be (numerically) positive definite was not.
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

// Input data degenerate for the requested statistic (e.g. all rows equal).
class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& msg) : Error(msg) {}
};

// A model id / model parameter combination that cannot be instantiated.
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& msg) : Error(msg) {}
};

// Bootstrap calibration could not produce enough valid replicates.
class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& msg) : Error(msg) {}
};

// Malformed input file. Carries 1-based row/column when known (0 = n/a);
// known coordinates are appended to the message.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t row = 0, std::size_t col = 0)
      : Error(row == 0 ? msg
                       : msg + " (row " + std::to_string(row) +
                             (col == 0 ? "" : ", col " + std::to_string(col)) +
                             ")"),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace hrstat
