#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmaflow/flow.hpp"
#include "cmaflow/grid.hpp"
#include "cmaflow/metric.hpp"
#include "cmaflow/speed.hpp"

namespace cmaflow {

/// a cos(2 pi k.x + phase), k indexed by real axis (x_1, y_1, ..., x_n, y_n).
struct CosineMode {
  std::vector<int> k;
  double amplitude = 0.0;
  double phase = 0.0;

  bool operator==(const CosineMode&) const = default;
};

/// Speed selection as written in a config file:
///   speed = { kind = "power", a = 2.0 }
///   speed = { kind = "custom", coeffs = [[1, 1.0], [-1, -0.5]] }
/// A bare token string ("log", "power:2", ...) is accepted too.
struct SpeedSpec {
  std::string kind = "log";  ///< log, linear, power, inverse_ma, negative_power, custom
  double a = 1.0;
  double scale = 1.0;
  std::vector<std::pair<int, double>> coeffs;

  SpeedFunction build() const;
  static SpeedSpec of(const SpeedFunction& F);

  bool operator==(const SpeedSpec&) const = default;
};

/// Everything a CLI run needs. TOML keys match the field names.
struct RunConfig {
  int n = 1;
  int N = 64;
  /// Row-major real and imaginary parts of chi_{kbar j}; empty means identity.
  std::vector<double> chi;
  std::vector<double> chi_imag;
  std::vector<CosineMode> f;
  std::vector<CosineMode> u0;
  SpeedSpec speed;
  std::string scheme = "imex";  ///< "imex" or "rk4"
  double cfl_safety = 0.25;
  double dt_max = 1e-2;
  double residual_tol = 1e-8;
  double t_max = 50.0;
  std::size_t max_steps = 1000000;
  std::string output_dir = "out";
  std::size_t dump_every = 0;  ///< field dump cadence in steps; 0 dumps only the final state
  bool checks = false;
  double A = 10.0;
  double B = 5.0;
  int check_steps = 20;
  double check_dt = 1e-5;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

Grid make_grid(const RunConfig& cfg);
BackgroundMetric make_metric(const RunConfig& cfg);
SpeedFunction make_speed(const RunConfig& cfg);
StepPolicy make_policy(const RunConfig& cfg);
GMonitor make_monitor(const RunConfig& cfg);

/// Sum of the modes sampled on the grid. Throws InvalidInput if a wave
/// vector does not have 2n entries.
ScalarField cosine_series(const Grid& grid, const std::vector<CosineMode>& modes);

}  // namespace cmaflow
