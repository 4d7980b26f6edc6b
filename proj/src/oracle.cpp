#include "cmaflow/oracle.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "cmaflow/endo.hpp"
#include "cmaflow/errors.hpp"

namespace cmaflow {

double compute_c0(const BackgroundMetric& chi, const ScalarField& f) {
  const ScalarField ef = map(f, [](double v) { return std::exp(v); });
  const double volume = chi.volume() * integrate(ScalarField(f.grid(), 1.0));
  return volume / (chi.volume() * integrate(ef));
}

StationaryProblem::StationaryProblem(BackgroundMetric chi_, ScalarField f_, double tol_)
    : chi(std::move(chi_)), f(std::move(f_)), c0(compute_c0(chi, f)), tol(tol_) {
  if (chi.n() != f.grid().n()) throw InvalidInput("chi dimension does not match the grid");
  if (!f.all_finite()) throw InvalidInput("f has non-finite samples");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
}

StationaryResidual residual(const Spectral& sp, const BackgroundMetric& chi, const ScalarField& f,
                            const ScalarField& phi, double c0) {
  const EndoField endo = build_endo(chi, sp, phi);
  ScalarField r = density_ratio(endo, f);
  r += -c0;
  const double sup = r.sup_norm();
  return {std::move(r), sup};
}

ScalarField solve_n1(const Spectral& sp, const StationaryProblem& problem) {
  if (sp.grid().n() != 1) throw InvalidInput("solve_n1 needs n = 1");
  ScalarField rhs = map(problem.f, [&](double v) { return problem.c0 * std::exp(v); });
  rhs += -1.0;
  // c0 makes the mean vanish analytically; remove the quadrature remainder.
  rhs += -rhs.mean();
  ScalarField phi = poisson_solve(sp, rhs, problem.chi.chi_inv());
  const EndoField endo = endo_from_hessian(problem.chi, complex_hessian(sp, phi));
  if (!endo.admissible)
    throw DomainError("stationary solution is not admissible on this grid (lambda_min = " +
                      std::to_string(endo.lambda_min[endo.worst_point]) +
                      "); use a larger N or a smaller f amplitude");
  return phi;
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }
double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void remove_mean(Vec& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

struct GmresOutcome {
  Vec x;
  double relative_residual;
  int iterations;
};

// Restarted GMRES for A x = b starting from x = 0.
GmresOutcome gmres(const std::function<Vec(const Vec&)>& A, const Vec& b, double tol, int restart,
                   int max_iterations) {
  const std::size_t n = b.size();
  Vec x(n, 0.0);
  const double bnorm = norm(b);
  if (bnorm == 0.0) return {x, 0.0, 0};
  int total = 0;
  double rel = 1.0;
  Vec r = b;
  while (total < max_iterations) {
    const double beta = norm(r);
    rel = beta / bnorm;
    if (rel <= tol) break;
    const int m = restart;
    std::vector<Vec> V;
    V.reserve(m + 1);
    V.push_back(r);
    for (double& v : V[0]) v /= beta;
    std::vector<Vec> Hm(m + 1, Vec(m, 0.0));
    Vec cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && total < max_iterations; ++k, ++total) {
      Vec w = A(V[k]);
      for (int i = 0; i <= k; ++i) {
        Hm[i][k] = dot(w, V[i]);
        for (std::size_t j = 0; j < n; ++j) w[j] -= Hm[i][k] * V[i][j];
      }
      Hm[k + 1][k] = norm(w);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * Hm[i][k] + sn[i] * Hm[i + 1][k];
        Hm[i + 1][k] = -sn[i] * Hm[i][k] + cs[i] * Hm[i + 1][k];
        Hm[i][k] = t;
      }
      const double denom = std::hypot(Hm[k][k], Hm[k + 1][k]);
      cs[k] = Hm[k][k] / denom;
      sn[k] = Hm[k + 1][k] / denom;
      const double hk1 = Hm[k + 1][k];
      Hm[k][k] = denom;
      Hm[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (hk1 != 0.0) {
        for (double& v : w) v /= hk1;
      }
      V.push_back(std::move(w));
      if (std::abs(g[k + 1]) / bnorm <= tol || hk1 == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    Vec y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= Hm[i][j] * y[j];
      y[i] = s / Hm[i][i];
    }
    for (int i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) x[j] += y[i] * V[i][j];
    // True residual for the restart and the stopping decision.
    const Vec ax = A(x);
    for (std::size_t j = 0; j < n; ++j) r[j] = b[j] - ax[j];
  }
  rel = norm(r) / bnorm;
  return {x, rel, total};
}

// log det h - f - log c0, together with the state it was computed from.
struct LogResidual {
  EndoField endo;
  ScalarField r;
};

std::optional<LogResidual> log_residual(const Spectral& sp, const StationaryProblem& pb,
                                        const ScalarField& phi) {
  EndoField endo = endo_from_hessian(pb.chi, complex_hessian(sp, phi));
  if (!endo.admissible) return std::nullopt;
  ScalarField r(phi.grid());
  const double logc0 = std::log(pb.c0);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::log(endo.det[i]) - pb.f[i] - logc0;
  return LogResidual{std::move(endo), std::move(r)};
}

double rms_projected(const ScalarField& r) {
  const double m = r.mean();
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += (r[i] - m) * (r[i] - m);
  return std::sqrt(s / static_cast<double>(r.size()));
}

}  // namespace

NewtonResult solve_newton(const Spectral& sp, const StationaryProblem& pb,
                          const std::optional<ScalarField>& initial_guess, const NewtonOptions& opt) {
  const Grid& grid = sp.grid();
  if (!(pb.f.grid() == grid)) throw InvalidInput("f lives on a different grid");
  NewtonResult out{initial_guess ? *initial_guess : ScalarField(grid), {}};
  if (!(out.phi.grid() == grid)) throw InvalidInput("initial guess lives on a different grid");
  out.phi = out.phi - ScalarField(grid, out.phi.mean());

  auto current = log_residual(sp, pb, out.phi);
  // build_endo throws with the offending point.
  if (!current) build_endo(pb.chi, sp, out.phi);
  const CMat& chi_inv = pb.chi.chi_inv();

  while (true) {
    const double sup = current->r.sup_norm();
    out.residual_history.push_back(sup);
    if (sup < pb.tol) return out;
    if (out.iterations >= opt.max_iterations)
      throw NonConvergence("Newton iteration budget exhausted", sup);

    // Projected linearization: Pi g^{j kbar} d_j d_kbar (P w) = -Pi r, with
    // P the inverse chi-Laplacian on mean-zero fields.
    const EndoField& endo = current->endo;
    auto precondition = [&](Vec w) {
      remove_mean(w);
      return poisson_solve(sp, ScalarField(grid, std::move(w)), chi_inv);
    };
    auto apply = [&](const Vec& w) {
      const ScalarField d = precondition(w);
      const ComplexMatrixField hess = complex_hessian(sp, d);
      Vec y(w.size());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = trace(endo.points[i].g_inv * hess[i]).real();
      remove_mean(y);
      return y;
    };
    Vec b(current->r.values().begin(), current->r.values().end());
    for (double& v : b) v = -v;
    remove_mean(b);
    const GmresOutcome lin = gmres(apply, b, opt.linear_tol, opt.gmres_restart, opt.max_linear_iterations);
    out.linear_iterations += lin.iterations;
    if (!(lin.relative_residual <= opt.linear_tol))
      throw NonConvergence("linear solve stalled", lin.relative_residual);
    Vec w = lin.x;
    remove_mean(w);
    const ScalarField delta = precondition(w);

    // Armijo backtracking on the projected residual, rejecting
    // non-admissible trial points.
    const double merit = rms_projected(current->r);
    double alpha = 1.0;
    int failures = 0;
    while (true) {
      ScalarField trial = out.phi + alpha * delta;
      trial += -trial.mean();
      auto next = log_residual(sp, pb, trial);
      if (next && rms_projected(next->r) <= (1.0 - opt.armijo_slope * alpha) * merit) {
        out.phi = std::move(trial);
        current = std::move(next);
        break;
      }
      if (++failures >= opt.max_backtracks) throw NonConvergence("line search failed", sup);
      alpha *= 0.5;
    }
    ++out.iterations;
  }
}

}  // namespace cmaflow
