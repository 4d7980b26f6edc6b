#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "cmaflow/grid.hpp"
#include "cmaflow/small_matrix.hpp"

namespace cmaflow {

namespace detail {
class FftPlan;
}

/// Constant-coefficient differential operator sum_a c_a * d^a, where a is a
/// multi-index over the real axes. Complex derivatives are built from
///   d_j    = (d/dx_j - i d/dy_j) / 2
///   d_jbar = (d/dx_j + i d/dy_j) / 2.
class DiffOp {
 public:
  using Index = std::array<int, Grid::kMaxAxes>;
  using Term = std::pair<Index, cplx>;

  static DiffOp identity();
  static DiffOp partial(int axis);
  static DiffOp holomorphic(int j);
  static DiffOp antiholomorphic(int k);

  DiffOp operator*(const DiffOp& other) const;
  DiffOp operator+(const DiffOp& other) const;
  DiffOp scaled(cplx s) const;

  const std::vector<Term>& terms() const { return terms_; }
  int max_order() const;

 private:
  void add(const Index& idx, cplx c);
  std::vector<Term> terms_;
};

/// chi^{p qbar} d_p d_qbar for the given inverse background metric.
DiffOp laplacian_op(const CMat& chi_inv);

/// Normalized Fourier coefficients: u(x) = sum_k c_k exp(2 pi i k.x).
struct Spectrum {
  Grid grid;
  std::vector<cplx> coeffs;
};

/// Pseudo-spectral differentiation on the periodic grid.
///
/// A factor (2 pi i k_a) with odd total power on an axis is zeroed at that
/// axis' Nyquist wavenumber, so every operator with a Hermitian symbol maps
/// real fields to real fields.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);

  const Grid& grid() const { return grid_; }

  Spectrum transform(const ScalarField& u) const;
  ScalarField synthesize(const Spectrum& s) const;

  /// Applies op in Fourier space and returns the complex result.
  ComplexField apply(const Spectrum& s, const DiffOp& op) const;
  /// Real part of apply(); exact for real operators on real fields.
  ScalarField apply_real(const Spectrum& s, const DiffOp& op) const;
  ScalarField apply_real(const ScalarField& u, const DiffOp& op) const;

  /// Symbol of op at flat mode index m (same layout as grid points).
  cplx symbol(const DiffOp& op, std::size_t mode) const;

  /// Symbols of op at every mode.
  std::vector<cplx> symbols(const DiffOp& op) const;

  /// Signed wavenumber of mode m along an axis, in [-N/2, N/2).
  int wavenumber(std::size_t mode, int axis) const;

  /// Largest |symbol| of d_j d_jbar summed over j: pi^2 n N^2 / 2.
  double max_ddbar_symbol() const;

 private:
  std::vector<cplx> inverse(std::vector<cplx> coeffs) const;

  Grid grid_;
  std::shared_ptr<const detail::FftPlan> plan_;
  // powers_[a][i][p] = (2 pi i k_i)^p on axis a, Nyquist-hygienic, p <= 4.
  std::vector<std::vector<std::array<cplx, 5>>> powers_;
};

/// u_{kbar j} = d_j d_kbar u at every point, entry (k, j).
ComplexMatrixField complex_hessian(const Spectral& sp, const ScalarField& u);
ComplexMatrixField complex_hessian(const Spectral& sp, const Spectrum& s);

/// chi^{p qbar} u_{qbar p}. Defaults to chi = I, i.e. a quarter of the real Laplacian.
ScalarField laplacian(const Spectral& sp, const ScalarField& u);
ScalarField laplacian(const Spectral& sp, const ScalarField& u, const CMat& chi_inv);

/// Mean-zero solution of laplacian(phi) = rhs. Throws CompatibilityError if
/// |mean(rhs)| > 1e-10.
ScalarField poisson_solve(const Spectral& sp, const ScalarField& rhs);
ScalarField poisson_solve(const Spectral& sp, const ScalarField& rhs, const CMat& chi_inv);

/// Holomorphic gradient (d_1 u, ..., d_n u).
std::vector<ComplexField> holomorphic_gradient(const Spectral& sp, const Spectrum& s);

}  // namespace cmaflow
