#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cmaflow/endo.hpp"
#include "cmaflow/errors.hpp"
#include "cmaflow/geometry.hpp"

using namespace cmaflow;
using std::numbers::pi;

namespace {

ScalarField random_potential(const Grid& g, std::mt19937& rng, double amplitude) {
  std::uniform_real_distribution<double> amp(-amplitude, amplitude), ph(0.0, 2 * pi);
  std::uniform_int_distribution<int> wave(-2, 2);
  std::vector<std::pair<std::array<int, 4>, std::array<double, 2>>> modes;
  for (int i = 0; i < 6; ++i) {
    std::array<int, 4> k{0, 0, 0, 0};
    for (int a = 0; a < g.axes(); ++a) k[a] = wave(rng);
    modes.push_back({k, {amp(rng), ph(rng)}});
  }
  return ScalarField::sample(g, [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& [k, ap] : modes) {
      double arg = ap[1];
      for (std::size_t a = 0; a < x.size(); ++a) arg += 2 * pi * k[a] * x[a];
      s += ap[0] * std::cos(arg);
    }
    return s;
  });
}

const BackgroundMetric kChi2(CMat::of(1.5, cplx(0.2, -0.3), cplx(0.2, 0.3), 0.8));

}  // namespace

TEST_CASE("background metric") {
  CHECK_THROWS_AS(BackgroundMetric(CMat::of(1.0, 2.0, 2.0, 1.0)), InvalidInput);          // indefinite
  CHECK_THROWS_AS(BackgroundMetric(CMat::of(1.0, cplx(0, 1), cplx(0, 1), 2.0)), InvalidInput);  // not Hermitian
  const CMat prod = kChi2.chi() * kChi2.chi_inv();
  CHECK(frobenius(prod - CMat::identity(2)) < 1e-14);
  CHECK(kChi2.det_chi() == doctest::Approx(1.5 * 0.8 - 0.13));
}

TEST_CASE("endo of the zero potential is the identity") {
  for (int n : {1, 2}) {
    const Grid g(n, 8);
    const EndoField e = build_endo(BackgroundMetric::identity(n), Spectral(g), ScalarField(g));
    CHECK(e.admissible);
    CHECK(e.det.min() == 1.0);
    CHECK(e.det.max() == 1.0);
    CHECK(e.trace.min() == n);
    CHECK(e.lambda_min.min() == 1.0);
    CHECK(e.lambda_max.max() == 1.0);
  }
}

TEST_CASE("single-mode determinant, n = 1") {
  // u = (0.5 / pi^2) cos(2 pi x) has d d-bar u = -0.5 cos(2 pi x).
  const Grid g(1, 32);
  const ScalarField u =
      ScalarField::sample(g, [](std::span<const double> x) { return 0.5 / (pi * pi) * std::cos(2 * pi * x[0]); });
  const EndoField e = build_endo(BackgroundMetric::identity(1), Spectral(g), u);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(e.det[i] - (1 - 0.5 * std::cos(2 * pi * g.coords(i)[0]))));
  CHECK(err < 1e-13);
}

TEST_CASE("pointwise 2x2 algebra") {
  const PointEndo p = endo_at(BackgroundMetric::identity(2),
                              CMat::of(1.0, cplx(0.3, 0.1), cplx(0.3, -0.1), 0.0));
  CHECK(p.det == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(p.trace == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(p.eigenvalues[0] * p.eigenvalues[1] == doctest::Approx(1.9).epsilon(1e-14));
  CHECK(p.eigenvalues[0] + p.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(frobenius(p.g * p.g_inv - CMat::identity(2)) < 1e-15);
}

TEST_CASE("endo invariants for random admissible potentials") {
  std::mt19937 rng(7);
  const Grid g(2, 8);
  const Spectral sp(g);
  for (int trial = 0; trial < 5; ++trial) {
    const ScalarField u = random_potential(g, rng, 0.005);
    const EndoField e = build_endo(kChi2, sp, u);
    REQUIRE(e.admissible);
    const ScalarField tr = laplacian(sp, u, kChi2.chi_inv());
    const EndoField shifted = build_endo(kChi2, sp, u + ScalarField(g, 17.0));
    double det_err = 0.0, tr_err = 0.0, shift_err = 0.0;
    bool bound = true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto& p = e.points[i];
      det_err = std::max(det_err, std::abs(p.eigenvalues[0] * p.eigenvalues[1] - p.det) / p.det);
      tr_err = std::max(tr_err, std::abs(p.trace - (2.0 + tr[i])));
      shift_err = std::max(shift_err, std::abs(shifted.det[i] - e.det[i]));
      bound = bound && p.eigenvalues[0] >= p.det / p.eigenvalues[1] * (1 - 1e-12);
      // h is chi-self-adjoint: its determinant and trace are real.
      CHECK(std::abs(det(p.h).imag()) < 1e-10 * std::abs(p.det));
      CHECK(std::abs(trace(p.h).imag()) < 1e-10 * std::abs(p.trace));
    }
    CHECK(det_err < 1e-10);
    CHECK(tr_err < 1e-10);
    CHECK(shift_err < 1e-11);  // the constant costs a few ulps of 17 in the transform
    CHECK(bound);
  }
}

TEST_CASE("admissibility failure reports the worst point") {
  const Grid g(1, 16);
  // d d-bar u = -2 cos(2 pi x): det h = 1 - 2 cos(2 pi x) is negative near x = 0.
  const ScalarField u =
      ScalarField::sample(g, [](std::span<const double> x) { return 2.0 / (pi * pi) * std::cos(2 * pi * x[0]); });
  try {
    build_endo(BackgroundMetric::identity(1), Spectral(g), u);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(e.point() == 0);
    CHECK(e.lambda_min() == doctest::Approx(-1.0));
  }
  const EndoField flagged = endo_from_hessian(BackgroundMetric::identity(1), complex_hessian(Spectral(g), u));
  CHECK_FALSE(flagged.admissible);
}

TEST_CASE("linearized coefficient") {
  const Grid g(2, 8);
  const Spectral sp(g);
  const EndoField e = build_endo(kChi2, sp, ScalarField(g));
  const ScalarField zero(g);
  const auto lc = linearized_coefficient(e, SpeedFunction::log(), zero);
  CHECK(lc.c.min() == doctest::Approx(1.0));
  CHECK(lc.c.max() == doctest::Approx(1.0));
  CHECK(frobenius(lc.g_inv[0] - kChi2.chi_inv()) < 1e-15);
  CHECK(linearized_coefficient(e, SpeedFunction::linear(), zero).c.max() == doctest::Approx(1.0));
  const double cf = 0.3;
  const auto sq = linearized_coefficient(e, SpeedFunction::power(2.0), ScalarField(g, cf));
  CHECK(sq.c.max() == doctest::Approx(2 * std::exp(-2 * cf)));
  CHECK_THROWS_AS(linearized_coefficient(e, SpeedFunction::power(-1.0), zero), ParabolicityError);
}

TEST_CASE("Aubin-Yau: zero potential") {
  const Grid g(2, 8);
  const auto rep = aubin_yau_check(BackgroundMetric::identity(2), Spectral(g), ScalarField(g));
  CHECK(rep.lhs.sup_norm() == 0.0);
  CHECK(rep.rhs.sup_norm() == 0.0);
  CHECK(rep.max_violation == 0.0);
}

TEST_CASE("Aubin-Yau: equality in dimension one") {
  const Grid g(1, 32);
  const ScalarField u = ScalarField::sample(g, [](std::span<const double> x) {
    return 0.03 * std::cos(2 * pi * x[0]) + 0.01 * std::sin(4 * pi * x[1]);
  });
  const auto rep = aubin_yau_check(BackgroundMetric::identity(1), Spectral(g), u);
  CHECK(sup_distance(rep.lhs, rep.rhs) < 1e-12 * std::max(1.0, rep.rhs_scale));
  CHECK(rep.rhs_scale > 0.1);
}

TEST_CASE("Aubin-Yau: inequality for random potentials, n = 2, chi != I") {
  std::mt19937 rng(2024);
  const Grid g(2, 16);
  const Spectral sp(g);
  for (int trial = 0; trial < 5;) {
    const ScalarField u = random_potential(g, rng, 0.008);
    if (!endo_from_hessian(kChi2, complex_hessian(sp, u)).admissible) continue;
    ++trial;
    const auto rep = aubin_yau_check(kChi2, sp, u);
    CHECK(rep.max_violation <= 1e-8 * rep.rhs_scale);
    CHECK(rep.rhs_scale > 0.0);
  }
}

TEST_CASE("determinant gradient matches spectral differentiation of det h") {
  std::mt19937 rng(99);
  const Grid g(2, 16);
  const Spectral sp(g);
  const ScalarField u = random_potential(g, rng, 0.005);
  const EndoField e = build_endo(kChi2, sp, u);
  const MetricGradient dg(sp, sp.transform(u));
  const auto analytic = det_gradient(e, dg);
  const auto spectral = packed_gradient(sp, e.det);
  const auto tr_analytic = trace_gradient(kChi2, dg, g.size());
  const auto tr_spectral = packed_gradient(sp, e.trace);
  double err = 0.0, tr_err = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    err = std::max(err, std::abs(analytic[i] - spectral[i]));
    tr_err = std::max(tr_err, std::abs(tr_analytic[i] - tr_spectral[i]));
  }
  CHECK(err < 1e-10);
  CHECK(tr_err < 1e-12);
}
