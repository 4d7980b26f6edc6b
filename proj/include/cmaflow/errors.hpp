#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmaflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite samples, mismatched grids, malformed files.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. rho <= 0 for a speed).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// chi + i ddbar u left the positive cone somewhere on the grid.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(std::size_t point, double lambda_min);

  std::size_t point() const { return point_; }
  double lambda_min() const { return lambda_min_; }

 private:
  std::size_t point_;
  double lambda_min_;
};

/// F' <= 0 encountered: the flow is not parabolic there.
class ParabolicityError : public Error {
 public:
  ParabolicityError(double rho, double derivative);

  double rho() const { return rho_; }
  double derivative() const { return derivative_; }

 private:
  double rho_;
  double derivative_;
};

/// Right-hand side of a Poisson problem with nonzero mean.
class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(double mean);
  double mean() const { return mean_; }

 private:
  double mean_;
};

/// Beta value for which the reduced-flow exponent is singular or zero.
class SingularReduction : public Error {
 public:
  using Error::Error;
};

/// Iterative solver gave up.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual);
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Malformed configuration; key() names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace cmaflow
