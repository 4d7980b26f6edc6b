#pragma once

#include <complex>
#include <memory>
#include <span>

namespace cmaflow::detail {

/// In-place multidimensional complex FFT of shape N^rank. Plans are shared
/// process-wide and safe to execute concurrently.
class FftPlan {
 public:
  static std::shared_ptr<const FftPlan> get(int rank, int N);

  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// Unnormalized forward transform (exponent sign -1).
  void forward(std::span<std::complex<double>> data) const;
  /// Unnormalized inverse transform (exponent sign +1).
  void backward(std::span<std::complex<double>> data) const;

 private:
  FftPlan(int rank, int N);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cmaflow::detail
