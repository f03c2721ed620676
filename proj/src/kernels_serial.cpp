#include <cmath>
#include <limits>

#include "kernels_detail.hpp"
#include "nlsflow/grid.hpp"

namespace nlsflow::kernels {

double nonlinearity_value(const PotentialPhase& phase, double rho) noexcept {
  switch (phase.kind) {
    case Nonlinearity::None:
      return 0.0;
    case Nonlinearity::Power:
      return std::pow(rho, phase.sigma);
    case Nonlinearity::PowerMinusOne:
      return power_difference_quotient(rho, phase.sigma);
    case Nonlinearity::Log:
      return std::log(rho + phase.log_floor);
  }
  return 0.0;
}

namespace serial {

void apply_kinetic_phase(const Grid& grid, std::span<cplx> spectrum, double coefficient) {
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    detail::rotate(spectrum[i], coefficient * grid.wavenumber_squared(i));
}

void apply_potential_phase(const Grid& grid, std::span<cplx> values, const PotentialPhase& phase) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == cplx{}) continue;
    detail::rotate(values[i], detail::potential_theta(grid, i, values[i], phase));
  }
}

void dealias(const Grid& grid, std::span<cplx> spectrum) {
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (!detail::dealias_keep(grid, i)) spectrum[i] = cplx{};
}

double sum_abs2(std::span<const cplx> values) {
  double sum = 0.0;
  for (const auto& z : values) sum += std::norm(z);
  return sum;
}

double sum_abs_pow(std::span<const cplx> values, double p) {
  double sum = 0.0;
  for (const auto& z : values) sum += std::pow(std::abs(z), p);
  return sum;
}

double sum_radius2_abs2(const Grid& grid, std::span<const cplx> values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) sum += grid.radius_squared(i) * std::norm(values[i]);
  return sum;
}

double sum_k2_abs2(const Grid& grid, std::span<const cplx> spectrum) {
  double sum = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) sum += grid.wavenumber_squared(i) * std::norm(spectrum[i]);
  return sum;
}

}  // namespace serial
}  // namespace nlsflow::kernels
