#pragma once

#include <array>
#include <vector>

#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/spectral.hpp"
#include "cmaflow/speed.hpp"

namespace cmaflow {

/// States with lambda_min(h) at or below this are rejected.
inline constexpr double kAdmissibilityFloor = 1e-10;

/// Pointwise algebra of h^i_j = chi^{i kbar} (chi_{kbar j} + u_{kbar j}).
struct PointEndo {
  CMat h;      ///< h^i_j
  CMat g;      ///< g_{kbar j}, entry (k, j)
  CMat g_inv;  ///< g^{j kbar}, entry (j, k)
  double det = 0.0;
  double trace = 0.0;
  std::array<double, 2> eigenvalues{};  ///< ascending
};

/// Endomorphism data from a Hessian entry u_{kbar j} given as matrix (k, j).
PointEndo endo_at(const BackgroundMetric& chi, const CMat& hessian);

/// h and its cached invariants over the whole grid. Immutable once built.
struct EndoField {
  Grid grid;
  std::vector<PointEndo> points;
  ScalarField det;
  ScalarField trace;
  ScalarField lambda_min;
  ScalarField lambda_max;
  bool admissible = true;
  std::size_t worst_point = 0;

  explicit EndoField(const Grid& g);
};

/// Builds h from an already computed complex Hessian; flags, never throws,
/// on non-admissible points.
EndoField endo_from_hessian(const BackgroundMetric& chi, const ComplexMatrixField& hessian);

/// Builds h for u. Throws AdmissibilityError (worst point, lambda_min) when
/// lambda_min <= kAdmissibilityFloor anywhere.
EndoField build_endo(const BackgroundMetric& chi, const Spectral& sp, const ScalarField& u);

/// Coefficient of the linearized operator L = c g^{j kbar} d_j d_kbar with
/// c = F'(e^{-f} det h) e^{-f} det h.
struct LinearizedCoefficient {
  ScalarField c;
  std::vector<CMat> g_inv;
};

/// Throws ParabolicityError if F' <= 0 anywhere on the range of e^{-f} det h.
LinearizedCoefficient linearized_coefficient(const EndoField& endo, const SpeedFunction& F,
                                             const ScalarField& f);

/// H = e^{-f} det h.
ScalarField density_ratio(const EndoField& endo, const ScalarField& f);

}  // namespace cmaflow
