#include "cmaflow/diagnostics.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmaflow/errors.hpp"

namespace cmaflow {

namespace {

constexpr std::size_t kColumns = 13;

std::array<double*, kColumns> fields(DiagnosticsRecord& r) {
  return {&r.t,          &r.dt,         &r.H_min,    &r.H_max,        &r.TrH_min,
          &r.TrH_max,    &r.lambda_min, &r.lambda_max, &r.osc_udot, &r.residual_sup,
          &r.G_max,      &r.phi_mean,   &r.phi_sup};
}

std::string format(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "t",          "dt",         "H_min",    "H_max",        "TrH_min", "TrH_max",  "lambda_min",
      "lambda_max", "osc_udot",   "residual_sup", "G_max",    "phi_mean", "phi_sup"};
  return cols;
}

DiagnosticsWriter::DiagnosticsWriter(std::ostream& out) : out_(out) {
  out_ << kDiagnosticsVersionLine << '\n';
  const auto& cols = diagnostics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
  out_ << '\n';
  out_.flush();
}

void DiagnosticsWriter::append(const DiagnosticsRecord& r) {
  DiagnosticsRecord copy = r;
  const auto f = fields(copy);
  for (std::size_t i = 0; i < f.size(); ++i) out_ << (i ? "," : "") << format(*f[i]);
  out_ << '\n';
  out_.flush();
}

void write_diagnostics(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  DiagnosticsWriter w(out);
  for (const auto& r : rows) w.append(r);
}

std::vector<DiagnosticsRecord> read_diagnostics(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsVersionLine)
    throw InvalidInput("diagnostics CSV: missing version line '" + std::string(kDiagnosticsVersionLine) + "'");
  if (!std::getline(in, line)) throw InvalidInput("diagnostics CSV: missing header");
  {
    std::stringstream ss(line);
    std::string name;
    std::size_t i = 0;
    const auto& cols = diagnostics_columns();
    while (std::getline(ss, name, ',')) {
      if (i >= cols.size() || name != cols[i]) throw InvalidInput("diagnostics CSV: unexpected column '" + name + "'");
      ++i;
    }
    if (i != cols.size()) throw InvalidInput("diagnostics CSV: wrong column count");
  }
  std::vector<DiagnosticsRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DiagnosticsRecord r;
    auto f = fields(r);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t i = 0; i < kColumns; ++i) {
      auto [next, ec] = std::from_chars(p, end, *f[i]);
      if (ec != std::errc()) throw InvalidInput("diagnostics CSV: bad number in row " + std::to_string(rows.size()));
      p = next;
      if (i + 1 < kColumns) {
        if (p == end || *p != ',') throw InvalidInput("diagnostics CSV: short row " + std::to_string(rows.size()));
        ++p;
      }
    }
    if (p != end) throw InvalidInput("diagnostics CSV: trailing data in row " + std::to_string(rows.size()));
    rows.push_back(r);
  }
  return rows;
}

std::vector<DiagnosticsRecord> read_diagnostics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_diagnostics(in);
}

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series) {
  DecayFit fit;
  if (series.empty() || !(series.front().second > kDecayFloor)) {
    fit.note = "skipped: oscillation at or below floor from the start (stationary data)";
    return fit;
  }
  std::size_t last = 0;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i].second > kDecayFloor) last = i;
  std::size_t first = 0;
  for (std::size_t i = last + 1; i-- > 0;)
    if (series[i].second >= 10.0 * series[last].second) {
      first = i;
      break;
    }
  const std::size_t m = last - first + 1;
  if (m < 3) {
    fit.note = "skipped: fewer than three samples in the fit window";
    return fit;
  }
  double st = 0.0, sy = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    st += series[i].first;
    sy += std::log(series[i].second);
  }
  const double tm = st / m, ym = sy / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double dt = series[i].first - tm;
    const double dy = std::log(series[i].second) - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (stt == 0.0) {
    fit.note = "skipped: degenerate time window";
    return fit;
  }
  const double slope = sty / stt;
  fit.fitted = true;
  fit.eta = -slope;
  fit.C = std::exp(ym - slope * tm);
  fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
  fit.points = m;
  fit.t_begin = series[first].first;
  fit.t_end = series[last].first;
  if (!(fit.eta > 0.0)) fit.note = "oscillation is not decaying over the fit window";
  return fit;
}

std::vector<std::pair<double, double>> oscillation_series(const std::vector<DiagnosticsRecord>& rows) {
  std::vector<std::pair<double, double>> s;
  s.reserve(rows.size());
  for (const auto& r : rows) s.emplace_back(r.t, r.osc_udot);
  return s;
}

}  // namespace cmaflow
