#include "cmaflow/small_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "cmaflow/errors.hpp"

namespace cmaflow {

CMat CMat::identity(int order) {
  CMat m(order);
  for (int i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::of(cplx a00, cplx a01, cplx a10, cplx a11) {
  CMat m(2);
  m(0, 0) = a00;
  m(0, 1) = a01;
  m(1, 0) = a10;
  m(1, 1) = a11;
  return m;
}

CMat& CMat::operator+=(const CMat& o) {
  for (int i = 0; i < 4; ++i) a[i] += o.a[i];
  return *this;
}

CMat& CMat::operator-=(const CMat& o) {
  for (int i = 0; i < 4; ++i) a[i] -= o.a[i];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& v : a) v *= s;
  return *this;
}

CMat operator+(CMat x, const CMat& y) { return x += y; }
CMat operator-(CMat x, const CMat& y) { return x -= y; }
CMat operator*(cplx s, CMat x) { return x *= s; }

CMat operator*(const CMat& x, const CMat& y) {
  CMat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

CMat adjoint(const CMat& m) {
  CMat r(m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) r(i, j) = std::conj(m(j, i));
  return r;
}

cplx trace(const CMat& m) {
  cplx t = 0.0;
  for (int i = 0; i < m.n; ++i) t += m(i, i);
  return t;
}

cplx det(const CMat& m) {
  if (m.n == 1) return m(0, 0);
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

CMat inverse(const CMat& m) {
  const cplx d = det(m);
  if (d == 0.0) throw DomainError("inverse of a singular matrix");
  CMat r(m.n);
  if (m.n == 1) {
    r(0, 0) = 1.0 / d;
    return r;
  }
  r(0, 0) = m(1, 1) / d;
  r(0, 1) = -m(0, 1) / d;
  r(1, 0) = -m(1, 0) / d;
  r(1, 1) = m(0, 0) / d;
  return r;
}

double hermitian_defect(const CMat& m) {
  double worst = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

double frobenius(const CMat& m) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) s += std::norm(m(i, j));
  return std::sqrt(s);
}

std::array<double, 2> hermitian_eigenvalues(const CMat& m) {
  if (m.n == 1) {
    const double v = m(0, 0).real();
    return {v, v};
  }
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_sum = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, std::abs(m(0, 1)));
  double hi = half_sum + radius;
  double lo = half_sum - radius;
  // Recover the small root from the product when it would cancel.
  const double product = a * d - std::norm(m(0, 1));
  if (half_sum > 0.0 && hi != 0.0) lo = product / hi;
  else if (half_sum < 0.0 && lo != 0.0) hi = product / lo;
  return {lo, hi};
}

CMat hpd_sqrt(const CMat& m) {
  if (m.n == 1) {
    CMat r(1);
    r(0, 0) = std::sqrt(m(0, 0).real());
    return r;
  }
  const double s = std::sqrt(det(m).real());
  const double t = std::sqrt(trace(m).real() + 2.0 * s);
  CMat r = m + cplx(s) * CMat::identity(2);
  r *= 1.0 / t;
  return r;
}

}  // namespace cmaflow
