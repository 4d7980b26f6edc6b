#include "cmaflow/geometry.hpp"

#include <algorithm>
#include <limits>

#include "cmaflow/errors.hpp"

namespace cmaflow {

MetricGradient::MetricGradient(const Spectral& sp, const Spectrum& u_hat)
    : n_(sp.grid().n()), values_(sp.grid().size() * n_ * n_ * n_) {
  const std::size_t size = sp.grid().size();
  for (int p = 0; p < n_; ++p)
    for (int s = p; s < n_; ++s)
      for (int r = 0; r < n_; ++r) {
        const DiffOp op = DiffOp::holomorphic(p) * DiffOp::holomorphic(s) * DiffOp::antiholomorphic(r);
        const auto field = sp.apply(u_hat, op);
        for (std::size_t i = 0; i < size; ++i) {
          values_[((i * n_ + p) * n_ + r) * n_ + s] = field.values[i];
          values_[((i * n_ + s) * n_ + r) * n_ + p] = field.values[i];
        }
      }
}

double pair(const CMat& m, const cplx* a, const cplx* b) {
  cplx s = 0.0;
  for (int j = 0; j < m.n; ++j)
    for (int k = 0; k < m.n; ++k) s += m(j, k) * a[j] * std::conj(b[k]);
  return s.real();
}

std::vector<cplx> packed_gradient(const Spectral& sp, const ScalarField& u) {
  const int n = sp.grid().n();
  const auto grads = holomorphic_gradient(sp, sp.transform(u));
  std::vector<cplx> out(u.size() * n);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = grads[j].values[i];
  return out;
}

std::vector<cplx> trace_gradient(const BackgroundMetric& chi, const MetricGradient& dg,
                                 std::size_t points) {
  const int n = dg.n();
  std::vector<cplx> out(points * n);
  for (std::size_t x = 0; x < points; ++x)
    for (int p = 0; p < n; ++p) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += chi.chi_inv()(i, k) * dg.at(x, p, k, i);
      out[x * n + p] = s;
    }
  return out;
}

std::vector<cplx> det_gradient(const EndoField& endo, const MetricGradient& dg) {
  const int n = dg.n();
  const std::size_t points = endo.grid.size();
  std::vector<cplx> out(points * n);
  for (std::size_t x = 0; x < points; ++x) {
    const CMat& gi = endo.points[x].g_inv;
    for (int p = 0; p < n; ++p) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += gi(i, k) * dg.at(x, p, k, i);
      out[x * n + p] = endo.det[x] * s;
    }
  }
  return out;
}

ScalarField third_order_square(const BackgroundMetric& chi, const EndoField& endo,
                               const MetricGradient& dg) {
  const int n = dg.n();
  const CMat& ci = chi.chi_inv();
  ScalarField out(endo.grid);
  for (std::size_t x = 0; x < out.size(); ++x) {
    const CMat& gi = endo.points[x].g_inv;
    cplx s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int j = 0; j < n; ++j)
          for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t)
              for (int k = 0; k < n; ++k)
                s += ci(p, q) * gi(j, r) * gi(t, k) * dg.at(x, p, r, t) *
                     std::conj(dg.at(x, q, j, k));
    out[x] = s.real();
  }
  return out;
}

AubinYauReport aubin_yau_check(const BackgroundMetric& chi, const Spectral& sp,
                               const ScalarField& u) {
  const EndoField endo = build_endo(chi, sp, u);
  const MetricGradient dg(sp, sp.transform(u));
  const int n = chi.n();
  const auto dT = trace_gradient(chi, dg, u.size());
  AubinYauReport rep{ScalarField(u.grid()), third_order_square(chi, endo, dg)};
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < u.size(); ++x) {
    const cplx* a = &dT[x * n];
    rep.lhs[x] = pair(endo.points[x].g_inv, a, a) / endo.trace[x];
    rep.max_violation = std::max(rep.max_violation, rep.lhs[x] - rep.rhs[x]);
  }
  rep.rhs_scale = rep.rhs.sup_norm();
  return rep;
}

}  // namespace cmaflow
