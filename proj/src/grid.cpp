#include "cmaflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmaflow/errors.hpp"

namespace cmaflow {

AdmissibilityError::AdmissibilityError(std::size_t point, double lambda_min)
    : Error("non-admissible state: lambda_min = " + std::to_string(lambda_min) +
            " at point " + std::to_string(point)),
      point_(point),
      lambda_min_(lambda_min) {}

ParabolicityError::ParabolicityError(double rho, double derivative)
    : Error("speed is not strictly increasing: F'(" + std::to_string(rho) +
            ") = " + std::to_string(derivative)),
      rho_(rho),
      derivative_(derivative) {}

CompatibilityError::CompatibilityError(double mean)
    : Error("Poisson right-hand side has nonzero mean " + std::to_string(mean) +
            " (check the normalizing constant c0)"),
      mean_(mean) {}

NonConvergence::NonConvergence(const std::string& what, double last_residual)
    : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
      last_residual_(last_residual) {}

ConfigError::ConfigError(std::string key, const std::string& message)
    : Error("config key '" + key + "': " + message), key_(std::move(key)) {}

Grid::Grid(int n, int N) : n_(n), N_(N), size_(1) {
  if (n < 1 || n > kMaxDim)
    throw InvalidInput("complex dimension must be 1 or 2, got " + std::to_string(n));
  if (N < 8 || (N & (N - 1)) != 0)
    throw InvalidInput("points per axis must be a power of two >= 8, got " +
                       std::to_string(N));
  for (int a = 0; a < axes(); ++a) size_ *= static_cast<std::size_t>(N);
}

std::array<int, Grid::kMaxAxes> Grid::multi_index(std::size_t point) const {
  std::array<int, kMaxAxes> idx{};
  for (int a = axes() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(point % N_);
    point /= N_;
  }
  return idx;
}

std::size_t Grid::flat_index(const std::array<int, kMaxAxes>& idx) const {
  std::size_t p = 0;
  for (int a = 0; a < axes(); ++a) p = p * N_ + static_cast<std::size_t>(idx[a]);
  return p;
}

std::array<double, Grid::kMaxAxes> Grid::coords(std::size_t point) const {
  const auto idx = multi_index(point);
  std::array<double, kMaxAxes> x{};
  for (int a = 0; a < axes(); ++a) x[a] = idx[a] * spacing();
  return x;
}

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidInput("field has " + std::to_string(values_.size()) +
                       " samples, grid expects " + std::to_string(grid_.size()));
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(std::span<const double>)>& fn) {
  ScalarField out(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto x = grid.coords(p);
    out.values_[p] = fn(std::span<const double>(x.data(), grid.axes()));
  }
  return out;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double ScalarField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

static void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidInput("grid mismatch between fields");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ScalarField& ScalarField::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField map(const ScalarField& a, const std::function<double(double)>& fn) {
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = fn(a[i]);
  return out;
}

double sup_distance(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexMatrixField::ComplexMatrixField(const Grid& grid)
    : grid_(grid), values_(grid.size(), CMat(grid.n())) {}

double ComplexMatrixField::max_hermitian_defect() const {
  double worst = 0.0;
  for (const auto& m : values_) worst = std::max(worst, hermitian_defect(m));
  return worst;
}

double integrate(const ScalarField& u) { return u.mean(); }

double integrate(const ScalarField& u, const ScalarField& weight) {
  require_same_grid(u.grid(), weight.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * weight[i];
  return s / static_cast<double>(u.size());
}

}  // namespace cmaflow
