#pragma once

#include <stdexcept>
#include <string>

namespace polystokes {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh text. Carries the 1-based line number of the offending line
/// (0 when the problem is not tied to a single line, e.g. unexpected EOF).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Invalid mesh topology or geometry detected while building a mesh.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what the implementation supports (quadrature order, dense probe size).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Local or global assembly failed (singular element mass matrix, inconsistent degrees).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear solve failed or did not reach the requested residual.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace polystokes
