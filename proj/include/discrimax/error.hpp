#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace discrimax {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method exhausted its budget (panels, iterations, evaluations).
class NonConvergent : public Error {
 public:
  using Error::Error;
};

/// Malformed mean-function source.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected)
      : Error(message), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

/// Parameter indices referenced by an expression are not contiguous from p1.
class ArityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfSupport : public Error {
 public:
  using Error::Error;
};

class InvalidVariance : public Error {
 public:
  using Error::Error;
};

class UnboundedSupport : public Error {
 public:
  using Error::Error;
};

/// The defining equation for the tilt parameter has no sign change on its search interval.
class NoBracket : public Error {
 public:
  using Error::Error;
};

class SupportMismatch : public Error {
 public:
  using Error::Error;
};

/// None of the multistart local searches of the inner minimization converged.
class InnerNonConvergent : public Error {
 public:
  using Error::Error;
};

class ZeroReference : public Error {
 public:
  using Error::Error;
};

/// Invalid problem description; carries the config line when known (0 otherwise).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0) : Error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace discrimax
