#include "cmaflow/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "cmaflow/errors.hpp"
#include "cmaflow/geometry.hpp"

namespace cmaflow {

namespace {

using Quantity = std::function<ScalarField(const FlowState&)>;

ScalarField time_difference(const StateWindow& w, TimeDifference td, const Quantity& q) {
  if (td == TimeDifference::Forward) {
    const double dt = w.next.t - w.cur.t;
    ScalarField d = q(w.next) - q(w.cur);
    d *= 1.0 / dt;
    return d;
  }
  if (!w.prev) throw InvalidInput("centered time difference needs the previous state");
  const double dt2 = w.next.t - w.prev->t;
  ScalarField d = q(w.next) - q(*w.prev);
  d *= 1.0 / dt2;
  return d;
}

ScalarField coefficient(const FlowEngine& e, const FlowState& s) {
  ScalarField c(s.H.grid());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = e.speed().deriv(s.H[i]) * s.H[i];
  return c;
}

IdentityReport report(const std::string& name, const StateWindow& w, const ScalarField& lhs,
                      const ScalarField& rhs) {
  IdentityReport r;
  r.name = name;
  r.t = w.cur.t;
  r.residual = sup_distance(lhs, rhs);
  r.scale = rhs.sup_norm();
  r.dt = w.next.t - w.cur.t;
  r.N = w.cur.u.grid().N();
  return r;
}

ScalarField log_trace(const FlowState& s) {
  return map(s.endo.trace, [](double v) { return std::log(v); });
}

ScalarField speed_field(const FlowEngine& e, const FlowState& s) {
  return map(s.H, [&](double rho) { return e.speed().eval(rho); });
}

}  // namespace

ScalarField apply_linearized(const FlowEngine& e, const FlowState& s, const ScalarField& v) {
  const ComplexMatrixField hess = complex_hessian(e.spectral(), v);
  ScalarField out(v.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = e.speed().deriv(s.H[i]) * s.H[i];
    out[i] = c * trace(s.endo.points[i].g_inv * hess[i]).real();
  }
  return out;
}

IdentityReport check_evol_u(const FlowEngine& e, const StateWindow& w, TimeDifference td) {
  const FlowState& s = w.cur;
  const int n = s.u.grid().n();
  const ScalarField lhs =
      time_difference(w, td, [](const FlowState& x) { return x.u; }) - apply_linearized(e, s, s.u);
  ScalarField rhs(s.u.grid());
  const CMat& chi = e.chi().chi();
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    const double c = e.speed().deriv(s.H[i]) * s.H[i];
    rhs[i] = s.rhs[i] - n * c + c * trace(s.endo.points[i].g_inv * chi).real();
  }
  return report("evol_u", w, lhs, rhs);
}

IdentityReport check_evol_F(const FlowEngine& e, const StateWindow& w, TimeDifference td) {
  const ScalarField lhs =
      time_difference(w, td, [&](const FlowState& x) { return speed_field(e, x); }) -
      apply_linearized(e, w.cur, w.cur.rhs);
  IdentityReport r = report("evol_F", w, lhs, ScalarField(lhs.grid()));
  r.scale = apply_linearized(e, w.cur, w.cur.rhs).sup_norm();
  return r;
}

ScalarField evol_F2_rhs(const FlowEngine& e, const FlowState& s) {
  const Spectral& sp = e.spectral();
  const int n = s.u.grid().n();
  const MetricGradient dg(sp, sp.transform(s.u));
  const auto dD = det_gradient(s.endo, dg);
  const auto df = packed_gradient(sp, e.f());
  ScalarField out(s.u.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const CMat& gi = s.endo.points[i].g_inv;
    const double D = s.endo.det[i];
    const double Fp = e.speed().deriv(s.H[i]);
    const double k = Fp * Fp * Fp * std::exp(-3.0 * e.f()[i]);
    const cplx* a = &dD[i * n];
    const cplx* b = &df[i * n];
    out[i] = -2.0 * k * D * pair(gi, a, a) - 2.0 * k * D * D * D * pair(gi, b, b) +
             4.0 * k * D * D * pair(gi, b, a);
  }
  return out;
}

ScalarField evol_F2_rhs_direct(const FlowEngine& e, const FlowState& s) {
  const int n = s.u.grid().n();
  const auto dF = packed_gradient(e.spectral(), s.rhs);
  ScalarField out(s.u.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c = e.speed().deriv(s.H[i]) * s.H[i];
    const cplx* a = &dF[i * n];
    out[i] = -2.0 * c * pair(s.endo.points[i].g_inv, a, a);
  }
  return out;
}

IdentityReport check_evol_F2(const FlowEngine& e, const StateWindow& w, TimeDifference td) {
  auto square = [&](const FlowState& x) {
    return map(speed_field(e, x), [](double v) { return v * v; });
  };
  const ScalarField lhs = time_difference(w, td, square) - apply_linearized(e, w.cur, square(w.cur));
  return report("evol_F2", w, lhs, evol_F2_rhs(e, w.cur));
}

namespace {

// Fields shared by both assemblies of the log Tr h right side.
struct TraceTerms {
  int n;
  std::vector<cplx> dT, dD, df;
  ScalarField Q;
  ScalarField lap_emf;  // Lap e^{-f}
  ScalarField c;
};

TraceTerms trace_terms(const FlowEngine& e, const FlowState& s) {
  const Spectral& sp = e.spectral();
  const MetricGradient dg(sp, sp.transform(s.u));
  const ScalarField emf = map(e.f(), [](double v) { return std::exp(-v); });
  return TraceTerms{s.u.grid().n(),
                    trace_gradient(e.chi(), dg, s.u.size()),
                    det_gradient(s.endo, dg),
                    packed_gradient(sp, e.f()),
                    third_order_square(e.chi(), s.endo, dg),
                    laplacian(sp, emf, e.chi().chi_inv()),
                    coefficient(e, s)};
}

}  // namespace

ScalarField evol_logtrh_rhs(const FlowEngine& e, const FlowState& s) {
  const TraceTerms tt = trace_terms(e, s);
  const CMat& ci = e.chi().chi_inv();
  const int n = tt.n;
  ScalarField out(s.u.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double T = s.endo.trace[i];
    const double D = s.endo.det[i];
    const double ef = std::exp(e.f()[i]);
    const double Fp = e.speed().deriv(s.H[i]);
    const double Fpp = e.speed().deriv2(s.H[i]);
    const cplx* aT = &tt.dT[i * n];
    const cplx* aD = &tt.dD[i * n];
    const cplx* af = &tt.df[i * n];
    const double dD2 = pair(ci, aD, aD);
    const double fD = pair(ci, af, aD);
    const double df2 = pair(ci, af, af);
    const double ratio = Fpp / (ef * Fp);
    const double bracket = pair(s.endo.points[i].g_inv, aT, aT) / T - tt.Q[i] + dD2 / (D * D) -
                           2.0 * fD / D + ratio * (df2 * D + dD2 / D - 2.0 * fD) + ef * tt.lap_emf[i];
    out[i] = tt.c[i] / T * bracket;
  }
  return out;
}

ScalarField evol_logtrh_rhs_precursors(const FlowEngine& e, const FlowState& s) {
  const TraceTerms tt = trace_terms(e, s);
  const CMat& ci = e.chi().chi_inv();
  const int n = tt.n;
  // g^{j kbar} d_j d_kbar Lap u.
  const ComplexMatrixField hessT = complex_hessian(e.spectral(), s.endo.trace);
  ScalarField out(s.u.grid());
  std::vector<cplx> dH(n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const CMat& gi = s.endo.points[i].g_inv;
    const double T = s.endo.trace[i];
    const double D = s.endo.det[i];
    const double emf = std::exp(-e.f()[i]);
    const cplx* aT = &tt.dT[i * n];
    const cplx* aD = &tt.dD[i * n];
    const cplx* af = &tt.df[i * n];
    const double phi4 = trace(gi * hessT[i]).real();
    const double lapD = D * phi4 - D * tt.Q[i] + pair(ci, aD, aD) / D;
    for (int j = 0; j < n; ++j) dH[j] = emf * (aD[j] - D * af[j]);
    const double dH2 = pair(ci, dH.data(), dH.data());
    const double lapH = emf * lapD - 2.0 * emf * pair(ci, af, aD) + D * tt.lap_emf[i];
    const double dt_lap_u = e.speed().deriv(s.H[i]) * lapH + e.speed().deriv2(s.H[i]) * dH2;
    out[i] = (dt_lap_u - tt.c[i] * phi4) / T + tt.c[i] / (T * T) * pair(gi, aT, aT);
  }
  return out;
}

IdentityReport check_evol_logtrh(const FlowEngine& e, const StateWindow& w, TimeDifference td) {
  const ScalarField lhs = time_difference(w, td, log_trace) - apply_linearized(e, w.cur, log_trace(w.cur));
  return report("evol_logtrh", w, lhs, evol_logtrh_rhs(e, w.cur));
}

double monitor_G(const FlowState& s, double A, double B, const ScalarField& phi) {
  double g = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i)
    g = std::max(g, std::log(s.endo.trace[i]) - A * phi[i] + 0.5 * B * s.rhs[i] * s.rhs[i]);
  return g;
}

double g_bound(const std::vector<DiagnosticsRecord>& rows, const SpeedFunction& F, double A, double B) {
  if (rows.empty()) throw InvalidInput("g_bound needs at least one record");
  double phi_sup = 0.0, F_sup = 0.0;
  for (const auto& r : rows) {
    phi_sup = std::max(phi_sup, r.phi_sup);
    F_sup = std::max({F_sup, std::abs(F.eval(r.H_min)), std::abs(F.eval(r.H_max))});
  }
  return rows.front().G_max + A * phi_sup + 0.5 * B * F_sup * F_sup;
}

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = {"evol_u", "evol_F", "evol_F2", "evol_logtrh"};
  return names;
}

std::vector<IdentityReport> check_trajectory(const FlowEngine& e, const ScalarField& u0, double dt,
                                             int steps, TimeDifference td) {
  if (steps < 2) throw InvalidInput("identity trajectory needs at least two steps");
  std::vector<IdentityReport> out;
  std::optional<FlowState> prev;
  FlowState cur = e.make_state(0.0, u0);
  for (int k = 0; k < steps; ++k) {
    FlowState next = e.step_rk4(cur, dt);
    if (td == TimeDifference::Forward || prev) {
      const StateWindow w{prev ? &*prev : nullptr, cur, next};
      out.push_back(check_evol_u(e, w, td));
      out.push_back(check_evol_F(e, w, td));
      out.push_back(check_evol_F2(e, w, td));
      out.push_back(check_evol_logtrh(e, w, td));
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

std::vector<OrderStudy> identity_order_study(const FlowEngine& e, const ScalarField& u0, double dt,
                                             int steps, TimeDifference td) {
  auto worst = [](const std::vector<IdentityReport>& reps) {
    std::map<std::string, double> m;
    for (const auto& r : reps) m[r.name] = std::max(m[r.name], r.residual);
    return m;
  };
  const auto coarse = worst(check_trajectory(e, u0, dt, steps, td));
  const auto fine = worst(check_trajectory(e, u0, 0.5 * dt, 2 * steps, td));
  std::vector<OrderStudy> out;
  for (const auto& name : identity_names()) {
    OrderStudy o{name, coarse.at(name), fine.at(name)};
    o.order = std::log2(o.coarse / o.fine);
    out.push_back(o);
  }
  return out;
}

}  // namespace cmaflow
