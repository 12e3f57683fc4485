#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace jjq {

// Base for every error raised on invalid input or an unsolvable request.
// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Netlist syntax/semantic error with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// No template matched. closest() names the best-scoring template.
class RecognitionError : public Error {
 public:
  RecognitionError(std::string closest, const std::string& message)
      : Error(message), closest_(std::move(closest)) {}

  const std::string& closest() const { return closest_; }

 private:
  std::string closest_;
};

// Missing or unreadable input file.
class IoError : public Error {
 public:
  using Error::Error;
};

// A parameter set that violates a type invariant (negative energy, odd grid, ...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class BasisMismatch : public Error {
 public:
  using Error::Error;
};

// Physics preconditions: no metastable well, not dispersive, not a two-level system.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace jjq
