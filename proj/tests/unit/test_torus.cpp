#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cmaflow/errors.hpp"
#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/spectral.hpp"

using namespace cmaflow;
using std::numbers::pi;

namespace {

ScalarField cos_x(const Grid& g) {
  return ScalarField::sample(g, [](std::span<const double> x) { return std::cos(2 * pi * x[0]); });
}

// Random real field with a handful of low modes on every axis.
ScalarField band_limited(const Grid& g, unsigned seed, int kmax = 3) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(-0.1, 0.1), ph(0.0, 2 * pi);
  std::uniform_int_distribution<int> wave(-kmax, kmax);
  struct M {
    std::array<int, 4> k;
    double a, p;
  };
  std::vector<M> modes;
  for (int i = 0; i < 8; ++i) {
    M m{{0, 0, 0, 0}, amp(rng), ph(rng)};
    for (int a = 0; a < g.axes(); ++a) m.k[a] = wave(rng);
    modes.push_back(m);
  }
  return ScalarField::sample(g, [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& m : modes) {
      double arg = m.p;
      for (std::size_t a = 0; a < x.size(); ++a) arg += 2 * pi * m.k[a] * x[a];
      s += m.a * std::cos(arg);
    }
    return s;
  });
}

// Modified Bessel I0 from its power series.
double bessel_i0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (x / 2) * (x / 2) / (double(k) * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("grid validates dimension and resolution") {
  CHECK_THROWS_AS(Grid(3, 16), InvalidInput);
  CHECK_THROWS_AS(Grid(1, 4), InvalidInput);
  CHECK_THROWS_AS(Grid(1, 24), InvalidInput);
  const Grid g(2, 8);
  CHECK(g.size() == 4096);
  CHECK(g.axes() == 4);
  CHECK(g.spacing() == doctest::Approx(0.125));
  for (std::size_t i : {std::size_t{0}, std::size_t{77}, std::size_t{4095}})
    CHECK(g.flat_index(g.multi_index(i)) == i);
  const auto x = g.coords(1);
  CHECK(x[3] == doctest::Approx(0.125));
  CHECK(x[0] == 0.0);
}

TEST_CASE("fields reject mismatched grids") {
  ScalarField a(Grid(1, 8)), b(Grid(1, 16));
  CHECK_THROWS_AS(a += b, InvalidInput);
  CHECK_THROWS_AS(sup_distance(a, b), InvalidInput);
  CHECK_THROWS_AS(integrate(a, b), InvalidInput);
}

TEST_CASE("transform round trip") {
  const Grid g(2, 8);
  const Spectral sp(g);
  const ScalarField u = band_limited(g, 3);
  CHECK(sup_distance(sp.synthesize(sp.transform(u)), u) < 1e-14);
}

TEST_CASE("complex hessian of a constant vanishes") {
  const Grid g(2, 8);
  const auto h = complex_hessian(Spectral(g), ScalarField(g, 3.7));
  double worst = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, frobenius(h[i]));
  CHECK(worst < 1e-14);
}

TEST_CASE("complex hessian of a single mode, n = 1") {
  const Grid g(1, 32);
  const auto h = complex_hessian(Spectral(g), cos_x(g));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(h[i](0, 0) - cplx(-pi * pi * std::cos(2 * pi * g.coords(i)[0]))));
  CHECK(err < 1e-12);
}

TEST_CASE("complex hessian against finite differences of the analytic function, n = 2") {
  // u = cos(2 pi x1) cos(2 pi y2): d_1 d_2bar u = (1/4)(d_x1 - i d_y1)(d_x2 + i d_y2) u
  // = (i/4) d_x1 d_y2 u. The oracle applies central differences with step
  // 1/64 to the closed form and is compared at O(h^2).
  const Grid g(2, 16);
  auto u = [](double x1, double y2) { return std::cos(2 * pi * x1) * std::cos(2 * pi * y2); };
  const double h = 1.0 / 64;
  const auto hess = complex_hessian(Spectral(g), ScalarField::sample(g, [&](std::span<const double> x) {
                                       return u(x[0], x[3]);
                                     }));
  double err = 0.0, exact_err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coords(i);
    const double dxy = (u(x[0] + h, x[3] + h) - u(x[0] + h, x[3] - h) - u(x[0] - h, x[3] + h) +
                        u(x[0] - h, x[3] - h)) /
                       (4 * h * h);
    const cplx fd = cplx(0, 0.25) * dxy;
    err = std::max(err, std::abs(hess[i](1, 0) - fd));
    const cplx exact = cplx(0, pi * pi) * std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[3]);
    exact_err = std::max(exact_err, std::abs(hess[i](1, 0) - exact));
  }
  // Central-difference truncation: (2 pi h)^2 / 3 relative, times pi^2.
  CHECK(err < pi * pi * std::pow(2 * pi * h, 2) / 3 * 1.1);
  CHECK(err > 1e-6);  // the oracle is genuinely approximate
  CHECK(exact_err < 1e-12);
}

TEST_CASE("complex hessian is pointwise Hermitian") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const Grid g(2, 8);
    const ScalarField u = band_limited(g, seed, 4);  // reaches the Nyquist wavenumber
    CHECK(complex_hessian(Spectral(g), u).max_hermitian_defect() < 1e-12 * std::max(1.0, u.sup_norm()));
  }
}

TEST_CASE("laplacian examples") {
  const Grid g(1, 32);
  const Spectral sp(g);
  ScalarField expect = cos_x(g);
  expect *= -pi * pi;
  CHECK(sup_distance(laplacian(sp, cos_x(g)), expect) < 1e-11);
  CHECK(laplacian(sp, ScalarField(g)).sup_norm() == 0.0);
  const Grid g2(2, 8);
  CHECK(std::abs(laplacian(Spectral(g2), band_limited(g2, 9)).mean()) < 1e-12);
}

TEST_CASE("trace of chi^{-1} times the hessian is the laplacian") {
  const Grid g(2, 8);
  const Spectral sp(g);
  const BackgroundMetric chi(CMat::of(2.0, cplx(0.3, 0.2), cplx(0.3, -0.2), 1.5));
  const ScalarField u = band_limited(g, 5);
  const auto h = complex_hessian(sp, u);
  const ScalarField lap = laplacian(sp, u, chi.chi_inv());
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(trace(chi.chi_inv() * h[i]).real() - lap[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("poisson solve") {
  const Grid g(1, 32);
  const Spectral sp(g);
  ScalarField rhs = cos_x(g);
  rhs *= -pi * pi;
  CHECK(sup_distance(poisson_solve(sp, rhs), cos_x(g)) < 1e-12);
  CHECK(poisson_solve(sp, ScalarField(g)).sup_norm() == 0.0);
  CHECK_THROWS_AS(poisson_solve(sp, ScalarField(g, 1e-6)), CompatibilityError);

  const Grid g2(2, 8);
  const Spectral sp2(g2);
  const BackgroundMetric chi(CMat::of(1.2, cplx(0.1, 0.4), cplx(0.1, -0.4), 0.9));
  const ScalarField u = band_limited(g2, 11);
  const ScalarField back = poisson_solve(sp2, laplacian(sp2, u, chi.chi_inv()), chi.chi_inv());
  CHECK(sup_distance(back, u - ScalarField(g2, u.mean())) < 1e-10);
}

TEST_CASE("non-finite input is rejected") {
  const Grid g(1, 8);
  ScalarField u(g);
  u[3] = std::nan("");
  CHECK_THROWS_AS(complex_hessian(Spectral(g), u), InvalidInput);
  CHECK_THROWS_AS(laplacian(Spectral(g), u), InvalidInput);
}

TEST_CASE("quadrature") {
  const Grid g(1, 64);
  CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(integrate(cos_x(g))) < 1e-14);
  const ScalarField e = map(cos_x(g), [](double c) { return std::exp(0.5 * c); });
  CHECK(std::abs(integrate(e) - bessel_i0(0.5)) < 1e-14);
  CHECK(integrate(cos_x(g), cos_x(g)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("hessian converges spectrally for a non band-limited field") {
  // u = exp(sin(2 pi x)): u_xx = (2 pi)^2 (cos^2 - sin) u, and d d-bar = u_xx / 4 in n = 1.
  std::vector<double> errs;
  for (int N : {16, 32, 64}) {
    const Grid g(1, N);
    const ScalarField u =
        ScalarField::sample(g, [](std::span<const double> x) { return std::exp(std::sin(2 * pi * x[0])); });
    const auto h = complex_hessian(Spectral(g), u);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = std::sin(2 * pi * g.coords(i)[0]), c = std::cos(2 * pi * g.coords(i)[0]);
      err = std::max(err, std::abs(h[i](0, 0).real() - pi * pi * (c * c - s) * std::exp(s)));
    }
    errs.push_back(err);
  }
  // Far faster than any fixed algebraic rate: a fourth-order method would
  // only gain a factor 16 from N = 16 to N = 32.
  CHECK(errs[0] / errs[1] > 1e4);
  CHECK(errs[2] < 1e-10);
}
