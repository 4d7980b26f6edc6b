#include "cmaflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "cmaflow/errors.hpp"
#include "cmaflow/identities.hpp"
#include "cmaflow/oracle.hpp"

namespace cmaflow {

void StepPolicy::validate() const {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw InvalidInput("cfl_safety must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw InvalidInput("dt_max must be positive");
  if (!(imex_factor >= 1.0)) throw InvalidInput("imex_factor must be at least 1");
  if (!(residual_tol > 0.0)) throw InvalidInput("residual_tol must be positive");
  if (!(t_max > 0.0)) throw InvalidInput("t_max must be positive");
  if (max_retries < 0) throw InvalidInput("max_retries must be non-negative");
}

ScalarField normalized(const ScalarField& u) {
  ScalarField phi = u;
  phi += -u.mean();
  return phi;
}

ScalarField flow_rhs(const Spectral& sp, const ScalarField& u, const ScalarField& f,
                     const BackgroundMetric& chi, const SpeedFunction& F) {
  const EndoField endo = build_endo(chi, sp, u);
  const ScalarField H = density_ratio(endo, f);
  return map(H, [&](double rho) { return F.eval(rho); });
}

FlowEngine::FlowEngine(const Spectral& sp, BackgroundMetric chi, ScalarField f, SpeedFunction F)
    : sp_(sp), chi_(std::move(chi)), f_(std::move(f)), F_(std::move(F)) {
  if (!(f_.grid() == sp_.grid())) throw InvalidInput("f lives on a different grid");
  if (chi_.n() != sp_.grid().n()) throw InvalidInput("chi dimension does not match the grid");
  if (!f_.all_finite()) throw InvalidInput("f has non-finite samples");
  c0_ = compute_c0(chi_, f_);
  const auto sym = sp_.symbols(laplacian_op(chi_.chi_inv()));
  lap_symbol_.resize(sym.size());
  for (std::size_t m = 0; m < sym.size(); ++m) lap_symbol_[m] = sym[m].real();
}

FlowState FlowEngine::make_state(double t, ScalarField u) const {
  EndoField endo = build_endo(chi_, sp_, u);
  ScalarField H = density_ratio(endo, f_);
  ScalarField rhs = map(H, [&](double rho) { return F_.eval(rho); });
  return FlowState{t, std::move(u), std::move(endo), std::move(H), std::move(rhs)};
}

ScalarField FlowEngine::rhs(const ScalarField& u) const { return flow_rhs(sp_, u, f_, chi_, F_); }

double FlowEngine::stiffness(const FlowState& s) const {
  double k = 0.0;
  for (std::size_t x = 0; x < s.u.size(); ++x) {
    const double rho = s.H[x];
    const double c = F_.deriv(rho) * rho;
    k = std::max(k, c / s.endo.lambda_min[x]);
  }
  return k * chi_.max_inv_eigenvalue();
}

double FlowEngine::stable_dt(const FlowState& s, const StepPolicy& policy) const {
  const double k = stiffness(s);
  if (!(k > 0.0)) return policy.dt_max;
  return std::min(policy.dt_max, policy.cfl_safety / (k * sp_.max_ddbar_symbol()));
}

double FlowEngine::proposed_dt(const FlowState& s, const StepPolicy& policy) const {
  const double dt = stable_dt(s, policy);
  if (policy.scheme == Scheme::ExplicitRK4) return dt;
  return std::min(policy.dt_max, policy.imex_factor * dt);
}

FlowState FlowEngine::step_rk4(const FlowState& s, double dt) const {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  const ScalarField& k1 = s.rhs;
  const ScalarField k2 = rhs(s.u + (0.5 * dt) * k1);
  const ScalarField k3 = rhs(s.u + (0.5 * dt) * k2);
  const ScalarField k4 = rhs(s.u + dt * k3);
  ScalarField u = s.u;
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return make_state(s.t + dt, std::move(u));
}

FlowState FlowEngine::step_imex(const FlowState& s, double dt) const {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  const double cbar = stiffness(s);
  Spectrum u_hat = sp_.transform(s.u);
  const Spectrum r_hat = sp_.transform(s.rhs);
  for (std::size_t m = 0; m < u_hat.coeffs.size(); ++m) {
    const double lam = lap_symbol_[m];
    u_hat.coeffs[m] = (u_hat.coeffs[m] + dt * (r_hat.coeffs[m] - cbar * lam * u_hat.coeffs[m])) /
                      (1.0 - dt * cbar * lam);
  }
  return make_state(s.t + dt, sp_.synthesize(u_hat));
}

FlowState FlowEngine::step(const FlowState& s, double dt, Scheme scheme) const {
  return scheme == Scheme::ExplicitRK4 ? step_rk4(s, dt) : step_imex(s, dt);
}

double FlowEngine::residual(const FlowState& s) const {
  double r = 0.0;
  for (std::size_t i = 0; i < s.H.size(); ++i) r = std::max(r, std::abs(s.H[i] - c0_));
  return r;
}

DiagnosticsRecord FlowEngine::record(const FlowState& s, double dt, const GMonitor& monitor) const {
  const ScalarField phi = normalized(s.u);
  DiagnosticsRecord r;
  r.t = s.t;
  r.dt = dt;
  r.H_min = s.H.min();
  r.H_max = s.H.max();
  r.TrH_min = s.endo.trace.min();
  r.TrH_max = s.endo.trace.max();
  r.lambda_min = s.endo.lambda_min.min();
  r.lambda_max = s.endo.lambda_max.max();
  r.osc_udot = s.rhs.oscillation();
  r.residual_sup = residual(s);
  r.G_max = monitor_G(s, monitor.A, monitor.B, phi);
  r.phi_mean = phi.mean();
  r.phi_sup = phi.sup_norm();
  return r;
}

FlowResult FlowEngine::run(const ScalarField& u0, const StepPolicy& policy, const GMonitor& monitor,
                           const StepObserver& observer) const {
  policy.validate();
  if (!(u0.grid() == sp_.grid())) throw InvalidInput("u0 lives on a different grid");
  if (!u0.all_finite()) throw InvalidInput("u0 has non-finite samples");

  FlowResult out{make_state(0.0, u0), ScalarField(sp_.grid()), {}};
  out.c0 = c0_;
  // H stays within its initial range along the flow, so checking F' there
  // (with margin) covers every state the run can reach.
  F_.validate(0.5 * out.state.H.min(), 2.0 * out.state.H.max());

  FlowState& s = out.state;
  double last_dt = 0.0;
  while (true) {
    const DiagnosticsRecord rec = record(s, last_dt, monitor);
    out.diagnostics.push_back(rec);
    if (observer) observer(out.steps, s, rec);
    out.residual = rec.residual_sup;
    if (rec.residual_sup < policy.residual_tol) {
      out.converged = true;
      break;
    }
    if (s.t >= policy.t_max || out.steps >= policy.max_steps) break;

    double dt = proposed_dt(s, policy);
    for (int attempt = 0;; ++attempt) {
      try {
        FlowState next = step(s, dt, policy.scheme);
        s = std::move(next);
        break;
      } catch (const AdmissibilityError&) {
        if (attempt >= policy.max_retries) throw;
        dt *= 0.5;
        ++out.retries;
      }
    }
    last_dt = dt;
    ++out.steps;
  }
  out.phi = normalized(s.u);
  return out;
}

}  // namespace cmaflow
