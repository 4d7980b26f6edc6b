#pragma once

#include "cmaflow/small_matrix.hpp"

namespace cmaflow {

/// Constant Hermitian positive background metric chi_{kbar j}.
///
/// Volumes use the normalization chi^n = det(chi) dVol, so that V = det(chi)
/// on the unit torus.
class BackgroundMetric {
 public:
  static BackgroundMetric identity(int n);

  /// Throws InvalidInput unless chi is Hermitian (to 1e-14) and positive.
  explicit BackgroundMetric(const CMat& chi);

  int n() const { return chi_.n; }
  const CMat& chi() const { return chi_; }
  const CMat& chi_inv() const { return chi_inv_; }
  /// chi^{-1/2}: conjugating g by it gives a Hermitian matrix similar to h.
  const CMat& chi_inv_sqrt() const { return chi_inv_sqrt_; }
  double det_chi() const { return det_chi_; }
  double volume() const { return det_chi_; }
  /// Largest eigenvalue of chi^{-1}.
  double max_inv_eigenvalue() const { return max_inv_eig_; }

 private:
  CMat chi_;
  CMat chi_inv_;
  CMat chi_inv_sqrt_;
  double det_chi_;
  double max_inv_eig_;
};

}  // namespace cmaflow
