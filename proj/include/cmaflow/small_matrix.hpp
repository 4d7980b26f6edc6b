#pragma once

#include <array>
#include <complex>

namespace cmaflow {

using cplx = std::complex<double>;

/// Dense complex matrix of order 1 or 2, stored row-major in a 2x2 block.
struct CMat {
  int n = 1;
  std::array<cplx, 4> a{};

  CMat() = default;
  explicit CMat(int order) : n(order) {}

  cplx& operator()(int r, int c) { return a[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return a[2 * r + c]; }

  static CMat identity(int order);
  /// Order-2 matrix from its four entries.
  static CMat of(cplx a00, cplx a01, cplx a10, cplx a11);

  CMat& operator+=(const CMat& o);
  CMat& operator-=(const CMat& o);
  CMat& operator*=(cplx s);
};

CMat operator+(CMat x, const CMat& y);
CMat operator-(CMat x, const CMat& y);
CMat operator*(const CMat& x, const CMat& y);
CMat operator*(cplx s, CMat x);

CMat adjoint(const CMat& m);
cplx trace(const CMat& m);
cplx det(const CMat& m);
CMat inverse(const CMat& m);

/// Largest |m(j,k) - conj(m(k,j))|.
double hermitian_defect(const CMat& m);

/// Frobenius norm.
double frobenius(const CMat& m);

/// Closed-form eigenvalues of a Hermitian matrix, ascending. Only the
/// Hermitian part is read: diagonal real parts and the upper off-diagonal.
std::array<double, 2> hermitian_eigenvalues(const CMat& m);

/// Principal square root of a Hermitian positive-definite matrix.
CMat hpd_sqrt(const CMat& m);

}  // namespace cmaflow
