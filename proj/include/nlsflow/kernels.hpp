#pragma once

#include <span>

#include "nlsflow/grid.hpp"

// Pointwise kernels of the split-step solvers. Each kernel exists twice: a
// plain serial loop kept as the reference, and an OpenMP version used by the
// solvers. Pointwise maps are bitwise identical between the two. Reductions in
// the OpenMP version sum fixed-size chunks and combine the partials in index
// order, so their result does not depend on the thread count.
namespace nlsflow::kernels {

enum class Nonlinearity {
  None,
  Power,          // rho^sigma
  PowerMinusOne,  // (rho^sigma - 1)/sigma
  Log,            // ln(rho + floor)
};

// Phase accumulated over one potential substep: theta = harmonic |x|^2 + nonlinear g(|u|^2).
// Both coefficients already include the substep length.
struct PotentialPhase {
  double harmonic = 0.0;
  double nonlinear = 0.0;
  Nonlinearity kind = Nonlinearity::None;
  double sigma = 0.0;
  double log_floor = kDefaultLogFloor;
};

double nonlinearity_value(const PotentialPhase& phase, double rho) noexcept;

namespace serial {
void apply_kinetic_phase(const Grid& grid, std::span<cplx> spectrum, double coefficient);
void apply_potential_phase(const Grid& grid, std::span<cplx> values, const PotentialPhase& phase);
void dealias(const Grid& grid, std::span<cplx> spectrum);
double sum_abs2(std::span<const cplx> values);
double sum_abs_pow(std::span<const cplx> values, double p);
double sum_radius2_abs2(const Grid& grid, std::span<const cplx> values);
double sum_k2_abs2(const Grid& grid, std::span<const cplx> spectrum);
}  // namespace serial

namespace parallel {
void apply_kinetic_phase(const Grid& grid, std::span<cplx> spectrum, double coefficient);
void apply_potential_phase(const Grid& grid, std::span<cplx> values, const PotentialPhase& phase);
void dealias(const Grid& grid, std::span<cplx> spectrum);
double sum_abs2(std::span<const cplx> values);
double sum_abs_pow(std::span<const cplx> values, double p);
double sum_radius2_abs2(const Grid& grid, std::span<const cplx> values);
double sum_k2_abs2(const Grid& grid, std::span<const cplx> spectrum);
}  // namespace parallel

// Kernels used by the library.
using parallel::apply_kinetic_phase;
using parallel::apply_potential_phase;
using parallel::dealias;
using parallel::sum_abs2;
using parallel::sum_abs_pow;
using parallel::sum_k2_abs2;
using parallel::sum_radius2_abs2;

// Restricts the calling thread's OpenMP team size (used by concurrent sweeps).
void set_thread_limit(int threads);
int thread_limit();

}  // namespace nlsflow::kernels
