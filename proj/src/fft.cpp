#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace cmaflow::detail {

namespace {
// FFTW's planner is not re-entrant; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  std::size_t size = 1;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

FftPlan::FftPlan(int rank, int N) : impl_(std::make_unique<Impl>()) {
  std::vector<int> dims(rank, N);
  for (int d : dims) impl_->size *= static_cast<std::size_t>(d);
  auto* scratch = fftw_alloc_complex(impl_->size);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->fwd = fftw_plan_dft(rank, dims.data(), scratch, scratch, FFTW_FORWARD, flags);
  impl_->bwd = fftw_plan_dft(rank, dims.data(), scratch, scratch, FFTW_BACKWARD, flags);
  fftw_free(scratch);
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
}

std::shared_ptr<const FftPlan> FftPlan::get(int rank, int N) {
  // Mutex first so it outlives the cache during static destruction.
  auto& mutex = planner_mutex();
  static std::map<std::pair<int, int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{rank, N}];
  if (!slot) slot.reset(new FftPlan(rank, N));
  return slot;
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->fwd, p, p);
}

void FftPlan::backward(std::span<std::complex<double>> data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(impl_->bwd, p, p);
}

}  // namespace cmaflow::detail
