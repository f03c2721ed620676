// Serial reference kernels against their OpenMP versions on the shapes the
// solvers use: 1D lines up to 2^16 points and 2D boxes up to 512^2.
// Range arguments: (dim, points per axis).

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nlsflow/grid.hpp"
#include "nlsflow/kernels.hpp"

using namespace nlsflow;

namespace {

struct Setup {
  Grid grid;
  std::vector<cplx> values;
  kernels::PotentialPhase phase;

  explicit Setup(const benchmark::State& state)
      : grid(make_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 12.0)) {
    values.resize(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double r2 = grid.radius_squared(i);
      values[i] = std::polar(std::exp(-r2 / 2.0), 0.3 * r2);
    }
    phase.harmonic = 1e-3;
    phase.nonlinear = 1e-3;
    phase.kind = kernels::Nonlinearity::PowerMinusOne;
    phase.sigma = 0.5;
  }
};

void finish(benchmark::State& state, const Setup& s) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.values.size()));
}

template <auto Kernel>
void potential(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) {
    Kernel(s.grid, s.values, s.phase);
    benchmark::ClobberMemory();
  }
  finish(state, s);
}

template <auto Kernel>
void kinetic(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) {
    Kernel(s.grid, s.values, 1e-3);
    benchmark::ClobberMemory();
  }
  finish(state, s);
}

template <auto Kernel>
void mass(benchmark::State& state) {
  Setup s(state);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(s.values));
  finish(state, s);
}

template <auto Kernel>
void log_potential(benchmark::State& state) {
  Setup s(state);
  s.phase.kind = kernels::Nonlinearity::Log;
  for (auto _ : state) {
    Kernel(s.grid, s.values, s.phase);
    benchmark::ClobberMemory();
  }
  finish(state, s);
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int n : {1024, 8192, 65536}) b->Args({1, n});
  for (int n : {128, 512}) b->Args({2, n});
}

}  // namespace

BENCHMARK(potential<kernels::serial::apply_potential_phase>)->Name("potential/serial")->Apply(shapes);
BENCHMARK(potential<kernels::parallel::apply_potential_phase>)->Name("potential/omp")->Apply(shapes)->UseRealTime();
BENCHMARK(log_potential<kernels::serial::apply_potential_phase>)->Name("log_potential/serial")->Apply(shapes);
BENCHMARK(log_potential<kernels::parallel::apply_potential_phase>)->Name("log_potential/omp")->Apply(shapes)->UseRealTime();
BENCHMARK(kinetic<kernels::serial::apply_kinetic_phase>)->Name("kinetic/serial")->Apply(shapes);
BENCHMARK(kinetic<kernels::parallel::apply_kinetic_phase>)->Name("kinetic/omp")->Apply(shapes)->UseRealTime();
BENCHMARK(mass<kernels::serial::sum_abs2>)->Name("sum_abs2/serial")->Apply(shapes);
BENCHMARK(mass<kernels::parallel::sum_abs2>)->Name("sum_abs2/omp")->Apply(shapes)->UseRealTime();

BENCHMARK_MAIN();
