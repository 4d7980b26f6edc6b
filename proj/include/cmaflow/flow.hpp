#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cmaflow/diagnostics.hpp"
#include "cmaflow/endo.hpp"
#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/spectral.hpp"
#include "cmaflow/speed.hpp"

namespace cmaflow {

enum class Scheme { ExplicitRK4, ImexStabilized };

struct StepPolicy {
  Scheme scheme = Scheme::ImexStabilized;
  double cfl_safety = 0.25;
  double dt_max = 1e-2;
  /// IMEX steps are this multiple of the explicit stable step (capped by dt_max).
  double imex_factor = 100.0;
  double residual_tol = 1e-8;
  double t_max = 50.0;
  std::size_t max_steps = 1000000;
  int max_retries = 10;

  /// Throws InvalidInput unless cfl_safety is in (0,1] and the limits are positive.
  void validate() const;
};

/// Coefficients of the monitored test function G = log Tr h - A phi + (B/2) F^2.
struct GMonitor {
  double A = 10.0;
  double B = 5.0;
};

/// u at time t with every cache derived from it.
struct FlowState {
  double t = 0.0;
  ScalarField u;
  EndoField endo;
  ScalarField H;    ///< e^{-f} det h
  ScalarField rhs;  ///< F(H) = du/dt
};

/// phi = u - (1/V) int u chi^n.
ScalarField normalized(const ScalarField& u);

struct FlowResult {
  FlowState state;
  ScalarField phi;
  std::vector<DiagnosticsRecord> diagnostics;
  bool converged = false;
  std::size_t steps = 0;
  std::size_t retries = 0;
  double c0 = 0.0;
  double residual = 0.0;  ///< sup |H - c0| of the final state
};

/// Called after the initial state (step 0) and after each accepted step.
using StepObserver =
    std::function<void(std::size_t step, const FlowState& state, const DiagnosticsRecord& record)>;

/// Time integrator for du/dt = F(e^{-f} det(chi^{-1}(chi + ddbar u)))
/// on the flat torus.
class FlowEngine {
 public:
  FlowEngine(const Spectral& sp, BackgroundMetric chi, ScalarField f, SpeedFunction F);

  const Spectral& spectral() const { return sp_; }
  const BackgroundMetric& chi() const { return chi_; }
  const ScalarField& f() const { return f_; }
  const SpeedFunction& speed() const { return F_; }
  /// V / int e^f chi^n.
  double c0() const { return c0_; }

  /// Throws AdmissibilityError / ParabolicityError.
  FlowState make_state(double t, ScalarField u) const;
  ScalarField rhs(const ScalarField& u) const;

  /// max_x c(x) * lambda_max(h^{-1}) * lambda_max(chi^{-1}): bounds the
  /// linearized operator by a multiple of the chi-Laplacian.
  double stiffness(const FlowState& s) const;
  /// cfl_safety / (stiffness * pi^2 n N^2 / 2), capped by dt_max.
  double stable_dt(const FlowState& s, const StepPolicy& policy) const;
  /// Step proposed for the policy's scheme.
  double proposed_dt(const FlowState& s, const StepPolicy& policy) const;

  FlowState step_rk4(const FlowState& s, double dt) const;
  /// (1 - dt cbar Lap) u+ = u + dt (F(H) - cbar Lap u), cbar = stiffness(s).
  FlowState step_imex(const FlowState& s, double dt) const;
  FlowState step(const FlowState& s, double dt, Scheme scheme) const;

  /// sup_x |H - c0|.
  double residual(const FlowState& s) const;

  DiagnosticsRecord record(const FlowState& s, double dt, const GMonitor& monitor) const;

  /// Integrates until the stationary residual drops below policy.residual_tol
  /// or the time/step budget runs out (converged = false, no exception).
  /// Admissibility failures halve dt up to policy.max_retries times, then throw.
  FlowResult run(const ScalarField& u0, const StepPolicy& policy, const GMonitor& monitor = {},
                 const StepObserver& observer = {}) const;

 private:
  Spectral sp_;
  BackgroundMetric chi_;
  ScalarField f_;
  SpeedFunction F_;
  double c0_;
  std::vector<double> lap_symbol_;
};

/// F(e^{-f} det h[u]) as a free function of its inputs.
ScalarField flow_rhs(const Spectral& sp, const ScalarField& u, const ScalarField& f,
                     const BackgroundMetric& chi, const SpeedFunction& F);

}  // namespace cmaflow
