#pragma once

#include <stdexcept>
#include <string>

namespace cclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tensor or operator violates one of its defining identities.
class InvalidTensor : public Error {
 public:
  InvalidTensor(const std::string& identity, double residual)
      : Error("invalid tensor: " + identity + " violated, max residual " + std::to_string(residual)),
        identity_(identity),
        residual_(residual) {}

  const std::string& identity() const noexcept { return identity_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string identity_;
  double residual_;
};

/// Array shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Inputs are well-formed but outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed input document (maps to exit code 2 in the CLI).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cclab
