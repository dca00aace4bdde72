#ifndef DOPINV_ERRORS_HPP
#define DOPINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dopinv {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration input (bad key, bad range, unparsable file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to a numerical routine (non-positive coefficient,
/// unsupported segment, malformed field).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed (iteration limit before the tolerance).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double final_residual)
      : Error(what), final_residual_(final_residual) {}
  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

/// A nonlinear iteration (Newton, reconstruction engine) failed to converge.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, int iterations_done)
      : Error(what), iterations_(iterations_done) {}
  int iterations_done() const { return iterations_; }

 private:
  int iterations_;
};

}  // namespace dopinv

#endif  // DOPINV_ERRORS_HPP
