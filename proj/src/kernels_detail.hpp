#pragma once

#include <cmath>
#include <cstdlib>

#include "nlsflow/kernels.hpp"

namespace nlsflow::kernels::detail {

inline constexpr std::size_t kChunk = 4096;

// u *= exp(-i theta), written out to avoid the inf/nan-checking complex product.
inline void rotate(cplx& u, double theta) noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double re = u.real();
  const double im = u.imag();
  u = cplx(re * c + im * s, im * c - re * s);
}

inline double potential_theta(const Grid& grid, std::size_t i, const cplx& u, const PotentialPhase& phase) noexcept {
  double theta = 0.0;
  if (phase.harmonic != 0.0) theta += phase.harmonic * grid.radius_squared(i);
  if (phase.kind != Nonlinearity::None && phase.nonlinear != 0.0) {
    const double rho = std::norm(u);
    theta += phase.nonlinear * nonlinearity_value(phase, rho);
  }
  return theta;
}

inline bool dealias_keep(const Grid& grid, std::size_t i) noexcept {
  const auto n = static_cast<std::size_t>(grid.points_per_axis);
  const long cutoff = grid.points_per_axis / 3;
  auto mode = [&](std::size_t j) {
    const long m = j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    return std::labs(m) <= cutoff;
  };
  if (grid.dim == 1) return mode(i);
  return mode(i / n) && mode(i % n);
}

}  // namespace nlsflow::kernels::detail
