#pragma once

#include <stdexcept>
#include <string>

namespace pie {

// Malformed or inconsistent input. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A cell that failed numeric parsing. Row and column are 1-based; the row
// counts data rows (the header is row 0).
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : InputError(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Well-formed input on which the math has no answer: tied importances,
// collinear designs, constant targets, empty sample weights. Exit code 3.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pie
