#pragma once

#include <stdexcept>
#include <string>

namespace pbo {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter vector outside the admissible box.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input (bad trajectory, dimension mismatch, bad JSON).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

// Laplace / Newton iteration failed to converge within its cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_gradient_norm)
      : Error(what), last_gradient_norm_(last_gradient_norm) {}
  double last_gradient_norm() const noexcept { return last_gradient_norm_; }

 private:
  double last_gradient_norm_;
};

// Covariance that is not positive semi-definite beyond the jitter threshold.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

}  // namespace pbo
