#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qiline {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at " + std::to_string(position) + ": " + message),
        position_(position),
        detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

/// A constructor argument breaks a type invariant (A(0), B(0.5, 1), ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class NoWitnessError : public Error {
 public:
  NoWitnessError(const std::string& message, double max_displacement)
      : Error(message), max_displacement_(max_displacement) {}
  double max_displacement() const noexcept { return max_displacement_; }

 private:
  double max_displacement_;
};

class FixedPointError : public Error {
 public:
  FixedPointError(const std::string& message, double location)
      : Error(message), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

}  // namespace qiline
