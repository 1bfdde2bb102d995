#pragma once

#include <stdexcept>
#include <string>

namespace thermreg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative routine (root finder, eigensolver, quadrature) did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The chemical-potential bracket could not be established.
class BracketError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// A dense materialization would exceed the configured dimension ceiling.
class DenseCeilingExceeded : public Error {
 public:
  DenseCeilingExceeded(long dim, long ceiling)
      : Error("dense dimension " + std::to_string(dim) + " exceeds ceiling " +
              std::to_string(ceiling)),
        dim_(dim),
        ceiling_(ceiling) {}

  long dim() const { return dim_; }
  long ceiling() const { return ceiling_; }

 private:
  long dim_;
  long ceiling_;
};

}  // namespace thermreg
