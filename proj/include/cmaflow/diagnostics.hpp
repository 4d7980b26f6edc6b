#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cmaflow {

/// Per-step scalar summary of a flow run. Column order is the CSV order.
struct DiagnosticsRecord {
  double t = 0.0;
  double dt = 0.0;
  double H_min = 0.0;
  double H_max = 0.0;
  double TrH_min = 0.0;
  double TrH_max = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double osc_udot = 0.0;
  double residual_sup = 0.0;
  double G_max = 0.0;
  double phi_mean = 0.0;
  double phi_sup = 0.0;

  bool operator==(const DiagnosticsRecord&) const = default;
};

inline constexpr const char* kDiagnosticsVersionLine = "# cmaflow-diag v1";

/// Column names in record order.
const std::vector<std::string>& diagnostics_columns();

/// Appends records to a CSV stream: version line and header on construction,
/// one flushed row per append.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(std::ostream& out);
  void append(const DiagnosticsRecord& r);

 private:
  std::ostream& out_;
};

void write_diagnostics(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& rows);
std::vector<DiagnosticsRecord> read_diagnostics(std::istream& in);
std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path);

/// Least-squares fit log(omega) = log(C) - eta t over the final decade of decay.
struct DecayFit {
  bool fitted = false;
  double eta = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::string note;
};

inline constexpr double kDecayFloor = 1e-12;

/// Fits the samples (t, omega). The window runs from the last sample that is
/// at least ten times the final above-floor value to that final value; if
/// the series never decays by a decade the whole above-floor series is used.
/// A series that starts at or below kDecayFloor, or leaves fewer than three
/// points, is skipped with a note.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series);

/// Convenience: the (t, osc_udot) series of a run.
std::vector<std::pair<double, double>> oscillation_series(const std::vector<DiagnosticsRecord>& rows);

}  // namespace cmaflow
