#pragma once

#include <stdexcept>
#include <string>

namespace kgwell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or inconsistent input (bad mesh extents, negative lambda, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A boundary facet on which m.nu changes sign; the mesh must be refined.
class MixedFacetError : public Error {
 public:
  using Error::Error;
};

/// No facet has m.nu > 0, so there is no dissipative boundary.
class EmptyGamma1Error : public Error {
 public:
  using Error::Error;
};

/// Setup-stage numerical failure: singular mass matrix, eigen/embedding
/// iteration that did not converge.
class NumericalSetupError : public Error {
 public:
  using Error::Error;
};

/// The implicit step's nonlinear solve did not converge.
class NonlinearSolveFailure : public Error {
 public:
  NonlinearSolveFailure(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Malformed or incomplete scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgwell
