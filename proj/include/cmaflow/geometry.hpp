#pragma once

#include <vector>

#include "cmaflow/endo.hpp"
#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/spectral.hpp"

namespace cmaflow {

/// First derivatives of the evolving metric, d_p g_{rbar s} = d_p d_s d_rbar u
/// (chi is constant, so covariant and partial derivatives agree).
class MetricGradient {
 public:
  MetricGradient(const Spectral& sp, const Spectrum& u_hat);

  int n() const { return n_; }
  /// d_p g_{rbar s} at a point.
  cplx at(std::size_t point, int p, int r, int s) const {
    return values_[((point * n_ + p) * n_ + r) * n_ + s];
  }

 private:
  int n_;
  std::vector<cplx> values_;
};

/// Re sum_{j,k} M(j,k) a_j conj(b_k) for n-vectors a, b. With M = g^{j kbar}
/// and a = grad A, b = grad B this is Re g^{j kbar} d_j A d_kbar B.
double pair(const CMat& m, const cplx* a, const cplx* b);

/// Holomorphic gradients of a real field, packed n per point.
std::vector<cplx> packed_gradient(const Spectral& sp, const ScalarField& u);

/// d_p Tr h = chi^{i kbar} d_p g_{kbar i}, packed n per point.
std::vector<cplx> trace_gradient(const BackgroundMetric& chi, const MetricGradient& dg,
                                 std::size_t points);

/// d_p det h = det h * g^{i kbar} d_p g_{kbar i}, packed n per point.
std::vector<cplx> det_gradient(const EndoField& endo, const MetricGradient& dg);

/// chi^{p qbar} g^{j rbar} g^{s kbar} d_p g_{rbar s} d_qbar g_{kbar j} at every point.
ScalarField third_order_square(const BackgroundMetric& chi, const EndoField& endo,
                               const MetricGradient& dg);

struct AubinYauReport {
  ScalarField lhs;  ///< g^{j kbar} d_kbar Tr h d_j Tr h / Tr h
  ScalarField rhs;  ///< third_order_square
  double max_violation = 0.0;  ///< max_x (lhs - rhs)
  double rhs_scale = 0.0;      ///< max_x |rhs|
};

/// Pointwise check of |d Tr h|_g^2 / Tr h <= |d g|^2. Throws AdmissibilityError.
AubinYauReport aubin_yau_check(const BackgroundMetric& chi, const Spectral& sp,
                               const ScalarField& u);

}  // namespace cmaflow
