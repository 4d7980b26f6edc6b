#pragma once

#include <string>
#include <vector>

#include "cmaflow/diagnostics.hpp"
#include "cmaflow/flow.hpp"

namespace cmaflow {

/// Residual of one evolution identity at one time.
struct IdentityReport {
  std::string name;
  double t = 0.0;
  double residual = 0.0;  ///< sup_x |time difference - L(.) - right side|
  double scale = 0.0;     ///< sup_x |right side|, for relative reading
  double dt = 0.0;
  int N = 0;
};

/// Forward: (q(t+dt) - q(t)) / dt, first order.
/// Centered: (q(t+dt) - q(t-dt)) / (2 dt), second order.
enum class TimeDifference { Forward, Centered };

/// Consecutive states of a trajectory with uniform step. prev is only read
/// by the centered difference; the identities are evaluated at cur.
struct StateWindow {
  const FlowState* prev = nullptr;
  const FlowState& cur;
  const FlowState& next;
};

/// L v = c g^{j kbar} d_j d_kbar v with c = F'(H) H, frozen at the state.
ScalarField apply_linearized(const FlowEngine& engine, const FlowState& s, const ScalarField& v);

/// (d_t - L) u = F - n c + c g^{j kbar} chi_{kbar j}.
IdentityReport check_evol_u(const FlowEngine& engine, const StateWindow& w, TimeDifference td);

/// (d_t - L) F = 0.
IdentityReport check_evol_F(const FlowEngine& engine, const StateWindow& w, TimeDifference td);

/// (d_t - L) F^2 = -2F'^3 e^{-3f} D |dD|_g^2 - 2F'^3 e^{-3f} D^3 |df|_g^2
///                 + 4F'^3 e^{-3f} D^2 Re<df, dD>_g,   D = det h.
IdentityReport check_evol_F2(const FlowEngine& engine, const StateWindow& w, TimeDifference td);

/// (d_t - L) log Tr h against its flat-background right side.
IdentityReport check_evol_logtrh(const FlowEngine& engine, const StateWindow& w, TimeDifference td);

/// Right side of the F^2 identity, term by term.
ScalarField evol_F2_rhs(const FlowEngine& engine, const FlowState& s);
/// -2 c |dF|_g^2 with dF differentiated spectrally from the F field.
ScalarField evol_F2_rhs_direct(const FlowEngine& engine, const FlowState& s);

/// Right side of the log Tr h identity in its final form.
ScalarField evol_logtrh_rhs(const FlowEngine& engine, const FlowState& s);
/// The same right side assembled from intermediate fields: Lap det h,
/// |dH|^2, Lap H and d_t Lap u, each built separately.
ScalarField evol_logtrh_rhs_precursors(const FlowEngine& engine, const FlowState& s);

/// max_x (log Tr h - A phi + (B/2) F^2).
double monitor_G(const FlowState& s, double A, double B, const ScalarField& phi);

/// max G at the first record + A sup_t |phi|_inf + (B/2) sup_t |F|_inf^2,
/// with |F|_inf read off the recorded H extrema (F is monotone).
double g_bound(const std::vector<DiagnosticsRecord>& rows, const SpeedFunction& F, double A, double B);

/// Every identity evaluated at each state of an RK4 trajectory that has the
/// neighbours its time difference needs. Only three states are held at once.
std::vector<IdentityReport> check_trajectory(const FlowEngine& engine, const ScalarField& u0, double dt,
                                             int steps, TimeDifference td);

/// Largest residual of each identity on a trajectory at dt and on the same
/// time span at dt/2; order = log2(coarse / fine).
struct OrderStudy {
  std::string name;
  double coarse = 0.0;
  double fine = 0.0;
  double order = 0.0;
};

std::vector<OrderStudy> identity_order_study(const FlowEngine& engine, const ScalarField& u0, double dt,
                                             int steps, TimeDifference td);

/// Names in the order check_trajectory emits them at each time.
const std::vector<std::string>& identity_names();

}  // namespace cmaflow
