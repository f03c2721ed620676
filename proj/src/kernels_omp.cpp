#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels_detail.hpp"

namespace nlsflow::kernels {
namespace {

// Below this size the team start-up costs more than the loop.
constexpr std::size_t kParallelThreshold = 1u << 13;

template <class ChunkSum>
double chunked_sum(std::size_t n, ChunkSum&& chunk_sum) {
  const std::size_t chunks = (n + detail::kChunk - 1) / detail::kChunk;
  std::vector<double> partial(chunks, 0.0);
  const auto count = static_cast<long>(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (long c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * detail::kChunk;
    const std::size_t end = std::min(n, begin + detail::kChunk);
    partial[static_cast<std::size_t>(c)] = chunk_sum(begin, end);
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

}  // namespace

void set_thread_limit(int threads) { omp_set_num_threads(std::max(1, threads)); }
int thread_limit() { return omp_get_max_threads(); }

namespace parallel {

void apply_kinetic_phase(const Grid& grid, std::span<cplx> spectrum, double coefficient) {
  const auto n = static_cast<long>(spectrum.size());
#pragma omp parallel for schedule(static) if (spectrum.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    detail::rotate(spectrum[j], coefficient * grid.wavenumber_squared(j));
  }
}

void apply_potential_phase(const Grid& grid, std::span<cplx> values, const PotentialPhase& phase) {
  const auto n = static_cast<long>(values.size());
#pragma omp parallel for schedule(static) if (values.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (values[j] == cplx{}) continue;
    detail::rotate(values[j], detail::potential_theta(grid, j, values[j], phase));
  }
}

void dealias(const Grid& grid, std::span<cplx> spectrum) {
  const auto n = static_cast<long>(spectrum.size());
#pragma omp parallel for schedule(static) if (spectrum.size() >= kParallelThreshold)
  for (long i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    if (!detail::dealias_keep(grid, j)) spectrum[j] = cplx{};
  }
}

double sum_abs2(std::span<const cplx> values) {
  return chunked_sum(values.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += std::norm(values[i]);
    return s;
  });
}

double sum_abs_pow(std::span<const cplx> values, double p) {
  return chunked_sum(values.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += std::pow(std::abs(values[i]), p);
    return s;
  });
}

double sum_radius2_abs2(const Grid& grid, std::span<const cplx> values) {
  return chunked_sum(values.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += grid.radius_squared(i) * std::norm(values[i]);
    return s;
  });
}

double sum_k2_abs2(const Grid& grid, std::span<const cplx> spectrum) {
  return chunked_sum(spectrum.size(), [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += grid.wavenumber_squared(i) * std::norm(spectrum[i]);
    return s;
  });
}

}  // namespace parallel
}  // namespace nlsflow::kernels
