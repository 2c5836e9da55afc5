#pragma once

#include <stdexcept>
#include <string>

namespace ness {

// All library failures derive from ness::Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A log-domain quantity left the finite range.
class NumericRange : public Error {
 public:
  using Error::Error;
};

// Requested size exceeds the dense/memory budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DegenerateSteadyState : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ness
