#ifndef CUSPFLOW_ERRORS_HPP
#define CUSPFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cuspflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. Line and column are 1-based; zero means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class NotUnimodularError : public Error {
 public:
  using Error::Error;
};

/// A threshold comparison could not be resolved at the configured mantissa width.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's stated precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A geometric fact that must hold was observed to fail; indicates an arithmetic bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace cuspflow

#endif
