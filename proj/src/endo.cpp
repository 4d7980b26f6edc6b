#include "cmaflow/endo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmaflow/errors.hpp"

namespace cmaflow {

PointEndo endo_at(const BackgroundMetric& chi, const CMat& hessian) {
  PointEndo p;
  p.g = chi.chi() + hessian;
  p.h = chi.chi_inv() * p.g;
  const cplx det_g = det(p.g);
  p.det = det_g.real() / chi.det_chi();
  p.trace = trace(p.h).real();
  const CMat sym = chi.chi_inv_sqrt() * p.g * chi.chi_inv_sqrt();
  p.eigenvalues = hermitian_eigenvalues(sym);
  p.g_inv = det_g != 0.0 ? inverse(p.g) : CMat(chi.n());
  return p;
}

EndoField::EndoField(const Grid& g)
    : grid(g), points(g.size()), det(g), trace(g), lambda_min(g), lambda_max(g) {}

EndoField endo_from_hessian(const BackgroundMetric& chi, const ComplexMatrixField& hessian) {
  const Grid& grid = hessian.grid();
  if (grid.n() != chi.n()) throw InvalidInput("background metric dimension does not match grid");
  EndoField e(grid);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e.points[i] = endo_at(chi, hessian[i]);
    const auto& p = e.points[i];
    e.det[i] = p.det;
    e.trace[i] = p.trace;
    e.lambda_min[i] = p.eigenvalues[0];
    e.lambda_max[i] = p.eigenvalues[1];
    if (!(p.eigenvalues[0] >= worst)) {
      worst = p.eigenvalues[0];
      e.worst_point = i;
    }
  }
  e.admissible = worst > kAdmissibilityFloor;
  return e;
}

EndoField build_endo(const BackgroundMetric& chi, const Spectral& sp, const ScalarField& u) {
  EndoField e = endo_from_hessian(chi, complex_hessian(sp, u));
  if (!e.admissible) throw AdmissibilityError(e.worst_point, e.lambda_min[e.worst_point]);
  return e;
}

ScalarField density_ratio(const EndoField& endo, const ScalarField& f) {
  ScalarField H(endo.grid);
  for (std::size_t i = 0; i < H.size(); ++i) H[i] = std::exp(-f[i]) * endo.det[i];
  return H;
}

LinearizedCoefficient linearized_coefficient(const EndoField& endo, const SpeedFunction& F,
                                             const ScalarField& f) {
  if (!endo.admissible) throw AdmissibilityError(endo.worst_point, endo.lambda_min[endo.worst_point]);
  LinearizedCoefficient out{ScalarField(endo.grid), std::vector<CMat>(endo.grid.size())};
  for (std::size_t i = 0; i < endo.grid.size(); ++i) {
    const double H = std::exp(-f[i]) * endo.det[i];
    out.c[i] = F.deriv(H) * H;
    out.g_inv[i] = endo.points[i].g_inv;
  }
  return out;
}

}  // namespace cmaflow
