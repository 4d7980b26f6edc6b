#include "cmaflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmaflow/errors.hpp"
#include "fft.hpp"

namespace cmaflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(const ScalarField& u, const char* what) {
  if (!u.all_finite()) throw InvalidInput(std::string(what) + ": non-finite input field");
}

}  // namespace

// ---------------------------------------------------------------------------
// DiffOp

DiffOp DiffOp::identity() {
  DiffOp op;
  op.add(Index{}, 1.0);
  return op;
}

DiffOp DiffOp::partial(int axis) {
  DiffOp op;
  Index idx{};
  idx[axis] = 1;
  op.add(idx, 1.0);
  return op;
}

DiffOp DiffOp::holomorphic(int j) {
  return partial(2 * j).scaled(0.5) + partial(2 * j + 1).scaled(cplx(0.0, -0.5));
}

DiffOp DiffOp::antiholomorphic(int k) {
  return partial(2 * k).scaled(0.5) + partial(2 * k + 1).scaled(cplx(0.0, 0.5));
}

void DiffOp::add(const Index& idx, cplx c) {
  for (auto& [i, v] : terms_) {
    if (i == idx) {
      v += c;
      return;
    }
  }
  terms_.emplace_back(idx, c);
}

DiffOp DiffOp::operator*(const DiffOp& other) const {
  DiffOp out;
  for (const auto& [ia, ca] : terms_)
    for (const auto& [ib, cb] : other.terms_) {
      Index idx{};
      for (int a = 0; a < Grid::kMaxAxes; ++a) idx[a] = ia[a] + ib[a];
      out.add(idx, ca * cb);
    }
  std::erase_if(out.terms_, [](const Term& t) { return t.second == 0.0; });
  return out;
}

DiffOp DiffOp::operator+(const DiffOp& other) const {
  DiffOp out = *this;
  for (const auto& [idx, c] : other.terms_) out.add(idx, c);
  std::erase_if(out.terms_, [](const Term& t) { return t.second == 0.0; });
  return out;
}

DiffOp DiffOp::scaled(cplx s) const {
  DiffOp out = *this;
  for (auto& t : out.terms_) t.second *= s;
  return out;
}

int DiffOp::max_order() const {
  int m = 0;
  for (const auto& [idx, c] : terms_) {
    int o = 0;
    for (int v : idx) o += v;
    m = std::max(m, o);
  }
  return m;
}

DiffOp laplacian_op(const CMat& chi_inv) {
  DiffOp op;
  for (int p = 0; p < chi_inv.n; ++p)
    for (int q = 0; q < chi_inv.n; ++q) {
      if (chi_inv(p, q) == 0.0) continue;
      op = op + (DiffOp::holomorphic(p) * DiffOp::antiholomorphic(q)).scaled(chi_inv(p, q));
    }
  return op;
}

// ---------------------------------------------------------------------------
// Spectral

Spectral::Spectral(const Grid& grid)
    : grid_(grid), plan_(detail::FftPlan::get(grid.axes(), grid.N())) {
  const int N = grid.N();
  powers_.resize(grid.axes());
  for (int a = 0; a < grid.axes(); ++a) {
    powers_[a].resize(N);
    for (int i = 0; i < N; ++i) {
      const int k = i < N / 2 ? i : i - N;
      const bool nyquist = (k == -N / 2);
      const cplx ik(0.0, kTwoPi * k);
      cplx p = 1.0;
      for (int e = 0; e <= 4; ++e) {
        powers_[a][i][e] = (nyquist && e % 2 == 1) ? cplx(0.0) : p;
        p *= ik;
      }
    }
  }
}

int Spectral::wavenumber(std::size_t mode, int axis) const {
  const int i = grid_.multi_index(mode)[axis];
  return i < grid_.N() / 2 ? i : i - grid_.N();
}

cplx Spectral::symbol(const DiffOp& op, std::size_t mode) const {
  const auto idx = grid_.multi_index(mode);
  cplx s = 0.0;
  for (const auto& [alpha, c] : op.terms()) {
    cplx term = c;
    for (int a = 0; a < grid_.axes(); ++a) {
      if (alpha[a] > 4) throw InvalidInput("derivative order above 4 per axis");
      term *= powers_[a][idx[a]][alpha[a]];
    }
    s += term;
  }
  return s;
}

std::vector<cplx> Spectral::symbols(const DiffOp& op) const {
  std::vector<cplx> out(grid_.size());
  const int N = grid_.N();
  const int axes = grid_.axes();
  std::array<int, Grid::kMaxAxes> idx{};
  for (std::size_t m = 0; m < out.size(); ++m) {
    cplx s = 0.0;
    for (const auto& [alpha, c] : op.terms()) {
      cplx term = c;
      for (int a = 0; a < axes; ++a) term *= powers_[a][idx[a]][alpha[a]];
      s += term;
    }
    out[m] = s;
    for (int a = axes - 1; a >= 0; --a) {
      if (++idx[a] < N) break;
      idx[a] = 0;
    }
  }
  return out;
}

double Spectral::max_ddbar_symbol() const {
  const double N = grid_.N();
  return std::numbers::pi * std::numbers::pi * grid_.n() * N * N / 2.0;
}

Spectrum Spectral::transform(const ScalarField& u) const {
  if (!(u.grid() == grid_)) throw InvalidInput("field grid does not match spectral grid");
  Spectrum s{grid_, std::vector<cplx>(u.values().begin(), u.values().end())};
  plan_->forward(s.coeffs);
  const double inv = 1.0 / static_cast<double>(grid_.size());
  for (auto& c : s.coeffs) c *= inv;
  return s;
}

std::vector<cplx> Spectral::inverse(std::vector<cplx> coeffs) const {
  plan_->backward(coeffs);
  return coeffs;
}

ScalarField Spectral::synthesize(const Spectrum& s) const {
  const auto v = inverse(s.coeffs);
  ScalarField out(grid_);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

ComplexField Spectral::apply(const Spectrum& s, const DiffOp& op) const {
  const auto sym = symbols(op);
  std::vector<cplx> c(s.coeffs.size());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = s.coeffs[m] * sym[m];
  ComplexField out(grid_);
  out.values = inverse(std::move(c));
  return out;
}

ScalarField Spectral::apply_real(const Spectrum& s, const DiffOp& op) const {
  const auto z = apply(s, op);
  ScalarField out(grid_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = z.values[i].real();
  return out;
}

ScalarField Spectral::apply_real(const ScalarField& u, const DiffOp& op) const {
  return apply_real(transform(u), op);
}

// ---------------------------------------------------------------------------
// Free operations

ComplexMatrixField complex_hessian(const Spectral& sp, const ScalarField& u) {
  require_finite(u, "complex_hessian");
  return complex_hessian(sp, sp.transform(u));
}

ComplexMatrixField complex_hessian(const Spectral& sp, const Spectrum& s) {
  const Grid& g = sp.grid();
  ComplexMatrixField out(g);
  const int n = g.n();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j <= k; ++j) {
      const DiffOp op = DiffOp::holomorphic(j) * DiffOp::antiholomorphic(k);
      const auto field = sp.apply(s, op);
      for (std::size_t p = 0; p < g.size(); ++p) {
        if (j == k) {
          out[p](k, k) = field.values[p].real();
        } else {
          out[p](k, j) = field.values[p];
          out[p](j, k) = std::conj(field.values[p]);
        }
      }
    }
  }
  return out;
}

ScalarField laplacian(const Spectral& sp, const ScalarField& u) {
  return laplacian(sp, u, CMat::identity(sp.grid().n()));
}

ScalarField laplacian(const Spectral& sp, const ScalarField& u, const CMat& chi_inv) {
  require_finite(u, "laplacian");
  return sp.apply_real(u, laplacian_op(chi_inv));
}

ScalarField poisson_solve(const Spectral& sp, const ScalarField& rhs) {
  return poisson_solve(sp, rhs, CMat::identity(sp.grid().n()));
}

ScalarField poisson_solve(const Spectral& sp, const ScalarField& rhs, const CMat& chi_inv) {
  require_finite(rhs, "poisson_solve");
  const double mean = rhs.mean();
  if (std::abs(mean) > 1e-10) throw CompatibilityError(mean);
  auto s = sp.transform(rhs);
  const auto sym = sp.symbols(laplacian_op(chi_inv));
  for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
    const double lam = sym[m].real();
    s.coeffs[m] = (m == 0 || lam == 0.0) ? cplx(0.0) : s.coeffs[m] / lam;
  }
  return sp.synthesize(s);
}

std::vector<ComplexField> holomorphic_gradient(const Spectral& sp, const Spectrum& s) {
  std::vector<ComplexField> out;
  for (int j = 0; j < sp.grid().n(); ++j) out.push_back(sp.apply(s, DiffOp::holomorphic(j)));
  return out;
}

}  // namespace cmaflow
