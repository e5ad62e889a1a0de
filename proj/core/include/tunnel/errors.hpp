#pragma once

#include <stdexcept>
#include <string>

namespace tunnel {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (t <= 0, x inside the barrier, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit a pole of T(k) or of an operator function.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// WKB quantities requested where no classical turning points exist.
class BranchError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A Fourier-type integral over the half line does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A method was asked to work outside its validity regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Norm bookkeeping of the finite-difference integrator went wrong.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace tunnel
