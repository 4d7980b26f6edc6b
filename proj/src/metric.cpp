#include "cmaflow/metric.hpp"

#include <algorithm>
#include <cmath>

#include "cmaflow/errors.hpp"

namespace cmaflow {

BackgroundMetric BackgroundMetric::identity(int n) { return BackgroundMetric(CMat::identity(n)); }

BackgroundMetric::BackgroundMetric(const CMat& chi) : chi_(chi) {
  if (chi.n < 1 || chi.n > 2) throw InvalidInput("background metric must be 1x1 or 2x2");
  if (hermitian_defect(chi) > 1e-14 * std::max(1.0, frobenius(chi)))
    throw InvalidInput("background metric is not Hermitian");
  const auto eig = hermitian_eigenvalues(chi);
  if (!(eig[0] > 0.0)) throw InvalidInput("background metric is not positive definite");
  // Symmetrize exactly so downstream algebra sees a Hermitian matrix.
  for (int i = 0; i < chi.n; ++i) chi_(i, i) = chi(i, i).real();
  if (chi.n == 2) chi_(1, 0) = std::conj(chi_(0, 1));
  chi_inv_ = inverse(chi_);
  chi_inv_sqrt_ = inverse(hpd_sqrt(chi_));
  det_chi_ = det(chi_).real();
  max_inv_eig_ = 1.0 / eig[0];
}

}  // namespace cmaflow
