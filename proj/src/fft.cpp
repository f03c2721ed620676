#include "nlsflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "nlsflow/error.hpp"

namespace nlsflow::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.forward);
      fftw_destroy_plan(plans.backward);
    }
  }

  PlanPair get(int dim, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(dim, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    std::vector<cplx> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    // ESTIMATE keeps plans (and therefore results) independent of timing.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair plans;
    if (dim == 1) {
      plans.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
      plans.backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
    } else if (dim == 2) {
      plans.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
      plans.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
    } else {
      throw GridError("FFT supports dim 1 or 2");
    }
    plans_.emplace(key, plans);
    return plans;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void check_size(const Grid& grid, std::span<cplx> data) {
  if (data.size() != grid.size()) throw GridError("FFT buffer size does not match grid");
}

}  // namespace

void forward(const Grid& grid, std::span<cplx> data) {
  check_size(grid, data);
  auto plans = cache().get(grid.dim, grid.points_per_axis);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.forward, buf, buf);
}

void inverse(const Grid& grid, std::span<cplx> data) {
  check_size(grid, data);
  auto plans = cache().get(grid.dim, grid.points_per_axis);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans.backward, buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

}  // namespace nlsflow::fft
