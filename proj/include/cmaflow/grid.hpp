#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cmaflow/small_matrix.hpp"

namespace cmaflow {

/// Uniform periodic lattice on C^n / Z^{2n}, unit period on every real axis.
///
/// Real axes are ordered x_1, y_1, ..., x_n, y_n and points are stored
/// row-major with the last axis fastest.
class Grid {
 public:
  static constexpr int kMaxDim = 2;
  static constexpr int kMaxAxes = 2 * kMaxDim;

  Grid(int n, int N);

  int n() const { return n_; }
  int N() const { return N_; }
  int axes() const { return 2 * n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 1.0 / N_; }

  /// Per-axis lattice indices of a flat point index (unused axes are 0).
  std::array<int, kMaxAxes> multi_index(std::size_t point) const;
  std::size_t flat_index(const std::array<int, kMaxAxes>& idx) const;

  /// Coordinates in [0,1) of a flat point index (unused axes are 0).
  std::array<double, kMaxAxes> coords(std::size_t point) const;

  bool operator==(const Grid& other) const = default;

 private:
  int n_;
  int N_;
  std::size_t size_;
};

/// Real periodic samples on a grid.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  /// Samples fn(x) at every point, x being the coordinate vector.
  static ScalarField sample(const Grid& grid,
                            const std::function<double(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double min() const;
  double max() const;
  double mean() const;
  double sup_norm() const;
  double oscillation() const { return max() - min(); }
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator+=(double c);
  ScalarField& operator*=(double c);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);

/// Pointwise map.
ScalarField map(const ScalarField& a, const std::function<double(double)>& fn);

/// sup_x |a - b|.
double sup_distance(const ScalarField& a, const ScalarField& b);

/// Complex periodic samples (holomorphic derivatives of real fields).
struct ComplexField {
  Grid grid;
  std::vector<cplx> values;

  explicit ComplexField(const Grid& g) : grid(g), values(g.size()) {}
};

/// n x n complex matrix per grid point. Entry (k, j) of the matrix at a point
/// is the component with barred index k and unbarred index j.
class ComplexMatrixField {
 public:
  explicit ComplexMatrixField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  CMat& operator[](std::size_t i) { return values_[i]; }
  const CMat& operator[](std::size_t i) const { return values_[i]; }

  /// Largest |M(j,k) - conj(M(k,j))| over all points.
  double max_hermitian_defect() const;

 private:
  Grid grid_;
  std::vector<CMat> values_;
};

/// Trapezoid rule on the torus: mean(u) times the unit coordinate volume.
double integrate(const ScalarField& u);
double integrate(const ScalarField& u, const ScalarField& weight);

}  // namespace cmaflow
