#pragma once

#include <optional>
#include <vector>

#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/spectral.hpp"

namespace cmaflow {

/// c0 = V / int e^f chi^n, by quadrature.
double compute_c0(const BackgroundMetric& chi, const ScalarField& f);

/// Limiting equation e^{-f} det(chi^{-1}(chi + ddbar phi)) = c0.
struct StationaryProblem {
  BackgroundMetric chi;
  ScalarField f;
  double c0;
  double tol = 1e-10;

  /// Fills c0 from compute_c0.
  StationaryProblem(BackgroundMetric chi, ScalarField f, double tol = 1e-10);
};

struct StationaryResidual {
  ScalarField field;  ///< e^{-f} det h - c0
  double sup = 0.0;
};

/// Throws AdmissibilityError if phi is not admissible.
StationaryResidual residual(const Spectral& sp, const BackgroundMetric& chi, const ScalarField& f,
                            const ScalarField& phi, double c0);

/// n = 1 only: the mean-zero solution of Lap phi = c0 e^f - 1. Throws
/// DomainError if the result is not admissible on this grid.
ScalarField solve_n1(const Spectral& sp, const StationaryProblem& problem);

struct NewtonOptions {
  int max_iterations = 50;
  int max_backtracks = 20;
  double armijo_slope = 1e-4;
  double linear_tol = 1e-10;
  int gmres_restart = 60;
  int max_linear_iterations = 2000;
};

struct NewtonResult {
  ScalarField phi;
  /// sup |log det h - f - log c0| before each iteration and after the last.
  std::vector<double> residual_history;
  int iterations = 0;
  int linear_iterations = 0;
};

/// Damped Newton on log det h[phi] = f + log c0 over mean-zero phi. Each
/// step solves the projected linearization with right-preconditioned GMRES
/// (inverse chi-Laplacian) to relative residual linear_tol. Throws
/// NonConvergence when the line search fails max_backtracks times or the
/// iteration budget runs out.
NewtonResult solve_newton(const Spectral& sp, const StationaryProblem& problem,
                          const std::optional<ScalarField>& initial_guess = std::nullopt,
                          const NewtonOptions& options = {});

}  // namespace cmaflow
