#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cmaflow/diagnostics.hpp"
#include "cmaflow/errors.hpp"
#include "cmaflow/flow.hpp"

using namespace cmaflow;

TEST_CASE("decay fit of exact exponential data") {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 100; ++i) {
    const double t = 0.05 * i;
    s.emplace_back(t, 3.0 * std::exp(-2.0 * t));
  }
  const DecayFit fit = fit_decay(s);
  REQUIRE(fit.fitted);
  CHECK(std::abs(fit.eta - 2.0) < 1e-6);
  CHECK(fit.C == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  // Window is the last decade: omega falls by 10 over ln(10)/2 time units.
  CHECK(fit.t_end == doctest::Approx(4.95));
  CHECK(fit.t_end - fit.t_begin == doctest::Approx(std::log(10.0) / 2).epsilon(0.05));
}

TEST_CASE("decay fit with seeded multiplicative noise") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.05 * i;
    s.emplace_back(t, 3.0 * std::exp(-2.0 * t) * (1.0 + noise(rng)));
  }
  const DecayFit fit = fit_decay(s);
  REQUIRE(fit.fitted);
  CHECK(fit.eta == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fit.r_squared > 0.9);
}

TEST_CASE("decay fit skip paths") {
  CHECK_FALSE(fit_decay({}).fitted);
  const DecayFit flat = fit_decay({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  CHECK_FALSE(flat.fitted);
  CHECK_FALSE(flat.note.empty());
  CHECK_FALSE(fit_decay({{0.0, 1.0}, {1.0, 0.5}}).fitted);

  // A trivially stationary run has zero oscillation from step 0.
  const Grid g(1, 16);
  const FlowEngine e(Spectral(g), BackgroundMetric::identity(1), ScalarField(g), SpeedFunction::log());
  const FlowResult r = e.run(ScalarField(g), StepPolicy{});
  const DecayFit fit = fit_decay(oscillation_series(r.diagnostics));
  CHECK_FALSE(fit.fitted);
  CHECK(fit.note.find("skipped") != std::string::npos);
}

TEST_CASE("diagnostics CSV round trip") {
  std::vector<DiagnosticsRecord> rows;
  for (int i = 0; i < 5; ++i) {
    DiagnosticsRecord r;
    r.t = 0.1 * i;
    r.dt = 1.0 / 3.0;
    r.H_min = -1e-300 * i;
    r.H_max = 1.0 + std::ldexp(1.0, -52);
    r.TrH_min = 2;
    r.TrH_max = 2.5;
    r.lambda_min = 0.57;
    r.lambda_max = 1.7;
    r.osc_udot = std::exp(-i);
    r.residual_sup = 1e-9;
    r.G_max = -3.25;
    r.phi_mean = 1e-17;
    r.phi_sup = 0.0123;
    rows.push_back(r);
  }
  std::stringstream buf;
  DiagnosticsWriter w(buf);
  for (const auto& r : rows) w.append(r);
  const std::string text = buf.str();
  CHECK(text.rfind("# cmaflow-diag v1\nt,dt,H_min,H_max,TrH_min,TrH_max,lambda_min,lambda_max,osc_udot,"
                   "residual_sup,G_max,phi_mean,phi_sup\n",
                   0) == 0);
  std::stringstream in(text);
  CHECK(read_diagnostics(in) == rows);
}

TEST_CASE("diagnostics CSV rejects malformed input") {
  std::stringstream no_version("t,dt\n");
  CHECK_THROWS_AS(read_diagnostics(no_version), InvalidInput);
  std::stringstream wrong_version("# cmaflow-diag v2\n");
  CHECK_THROWS_AS(read_diagnostics(wrong_version), InvalidInput);

  std::stringstream buf;
  DiagnosticsWriter w(buf);
  w.append(DiagnosticsRecord{});
  const std::string good = buf.str();
  std::stringstream short_row(good.substr(0, good.size() - 3) + "\n");
  CHECK_THROWS_AS(read_diagnostics(short_row), InvalidInput);
  std::string bad = good;
  bad[bad.size() - 2] = 'x';
  std::stringstream bad_number(bad);
  CHECK_THROWS_AS(read_diagnostics(bad_number), InvalidInput);
}
