#include "nlsflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlsflow/error.hpp"
#include "nlsflow/fft.hpp"
#include "nlsflow/kernels.hpp"

namespace nlsflow {

std::size_t Grid::size() const noexcept {
  const auto n = static_cast<std::size_t>(points_per_axis);
  return dim == 1 ? n : n * n;
}

double Grid::cell_volume() const noexcept { return dim == 1 ? spacing : spacing * spacing; }

double Grid::max_wavenumber() const noexcept { return std::abs(nyquist()); }

double Grid::radius_squared(std::size_t i) const noexcept {
  if (dim == 1) return coords[i] * coords[i];
  const auto n = static_cast<std::size_t>(points_per_axis);
  const double a = coords[i / n];
  const double b = coords[i % n];
  return a * a + b * b;
}

double Grid::wavenumber_squared(std::size_t i) const noexcept {
  if (dim == 1) return wavenumbers[i] * wavenumbers[i];
  const auto n = static_cast<std::size_t>(points_per_axis);
  const double a = wavenumbers[i / n];
  const double b = wavenumbers[i % n];
  return a * a + b * b;
}

Grid make_grid(int dim, int n, double half_length) {
  if (dim != 1 && dim != 2) throw GridError("dimension " + std::to_string(dim) + " not supported (1 or 2)");
  if (n < 8 || (n & (n - 1)) != 0) throw GridError("FFT size " + std::to_string(n) + " must be a power of two >= 8");
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw GridError("half length must be positive");

  Grid g;
  g.dim = dim;
  g.points_per_axis = n;
  g.half_length = half_length;
  g.spacing = 2.0 * half_length / n;
  g.coords.resize(static_cast<std::size_t>(n));
  g.wavenumbers.resize(static_cast<std::size_t>(n));
  const double dk = std::numbers::pi / half_length;
  for (int j = 0; j < n; ++j) {
    g.coords[static_cast<std::size_t>(j)] = -half_length + j * g.spacing;
    const int m = j < n / 2 ? j : j - n;
    g.wavenumbers[static_cast<std::size_t>(j)] = dk * m;
  }
  return g;
}

std::string_view model_name(Model model) {
  switch (model) {
    case Model::Direct: return "direct";
    case Model::Rescaled: return "rescaled";
    case Model::Log: return "log";
    case Model::RescaledLens: return "rescaled-lens";
    case Model::DirectLens: return "direct-lens";
    case Model::TrackedLens: return "tracked-lens";
  }
  return "unknown";
}

Model model_from_name(std::string_view name) {
  for (auto m : {Model::Direct, Model::Rescaled, Model::Log, Model::RescaledLens, Model::DirectLens, Model::TrackedLens})
    if (model_name(m) == name) return m;
  throw FormatError("unknown model '" + std::string(name) + "'");
}

bool is_lens(Model model) noexcept {
  return model == Model::RescaledLens || model == Model::DirectLens || model == Model::TrackedLens;
}

WaveField::WaveField(Grid g, double sigma_, Model model_, double time_)
    : grid(std::move(g)), values(grid.size()), time(time_), sigma(sigma_), model(model_) {}

void Density::normalize() {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double total = sum * grid.cell_volume();
  if (!(total > 0.0) || !std::isfinite(total)) throw NormalizationError("density has no mass");
  for (double& v : values) v /= total;
  integral = 1.0;
}

bool Density::is_normalized(double tol) const {
  double sum = 0.0;
  for (double v : values) {
    if (v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum * grid.cell_volume() - 1.0) <= tol;
}

Density make_density(Grid grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw GridError("density size does not match grid");
  for (double v : values)
    if (!(v >= 0.0)) throw NormalizationError("density must be nonnegative and finite");
  Density d{std::move(grid), std::move(values), 0.0};
  double sum = 0.0;
  for (double v : d.values) sum += v;
  d.integral = sum * d.grid.cell_volume();
  return d;
}

WaveField zero_field(const Grid& grid, double sigma, Model model) {
  WaveField f(grid, sigma, model);
  if (model == Model::DirectLens) {
    f.tau = 1.0;
    f.tau_dot = 0.0;
  }
  return f;
}

WaveField gaussian_state(const Grid& grid, double width, std::span<const double> center,
                         std::span<const double> phase_slope, double sigma, Model model) {
  if (!(width > 0.0)) throw ResolutionError("gaussian width must be positive");
  if (4.0 * width / grid.spacing < 8.0)
    throw ResolutionError("gaussian of width " + std::to_string(width) + " is sampled by fewer than 8 points");
  auto axis_value = [](std::span<const double> v, int axis) {
    return v.empty() ? 0.0 : v[static_cast<std::size_t>(axis)];
  };
  for (int a = 0; a < grid.dim; ++a) {
    if (!center.empty() && center.size() != static_cast<std::size_t>(grid.dim))
      throw GridError("center needs one entry per axis");
    if (!phase_slope.empty() && phase_slope.size() != static_cast<std::size_t>(grid.dim))
      throw GridError("phase slope needs one entry per axis");
    if (std::abs(axis_value(center, a)) >= grid.half_length) throw GridError("gaussian center outside box");
    if (std::abs(axis_value(phase_slope, a)) >= grid.max_wavenumber())
      throw ResolutionError("phase slope beyond the Nyquist wavenumber");
  }

  WaveField f(grid, sigma, model);
  const auto n = static_cast<std::size_t>(grid.points_per_axis);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double r2 = 0.0;
    double phase = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const std::size_t j = grid.dim == 1 ? i : (a == 0 ? i / n : i % n);
      const double x = grid.coords[j];
      const double dx = x - axis_value(center, a);
      r2 += dx * dx;
      phase += axis_value(phase_slope, a) * x;
    }
    f.values[i] = std::polar(std::exp(-r2 / (2.0 * width * width)), phase);
  }
  const double m = mass(f);
  const double scale = 1.0 / std::sqrt(m);
  for (auto& z : f.values) z *= scale;
  return f;
}

double mass(const WaveField& field) { return field.grid.cell_volume() * kernels::sum_abs2(field.values); }

double power_difference_quotient(double y, double s) noexcept {
  if (s < 1e-8) return std::log(y);
  if (y == 0.0) return -1.0 / s;
  return std::expm1(s * std::log(y)) / s;
}

double direct_potential(double rho, double sigma) noexcept { return std::pow(rho, sigma + 1.0) / (sigma + 1.0); }

double rescaled_potential(double rho, double sigma) noexcept {
  if (rho == 0.0) return 0.0;
  return (rho * power_difference_quotient(rho, sigma) - rho) / (sigma + 1.0);
}

double log_potential(double rho, double log_floor) noexcept {
  const double e = log_floor;
  if (e == 0.0) return rho == 0.0 ? 0.0 : rho * std::log(rho) - rho;
  return (rho + e) * std::log(rho + e) - rho - e * std::log(e);
}

namespace {

std::vector<cplx> spectrum_of(const WaveField& field) {
  std::vector<cplx> s = field.values;
  fft::forward(field.grid, s);
  return s;
}

// Parseval factor: h^d sum |u|^2 = (h^d / N^d) sum |u_hat|^2.
double parseval_weight(const Grid& grid) { return grid.cell_volume() / static_cast<double>(grid.size()); }

double potential_density(const WaveField& field, double rho, double log_floor) {
  switch (field.model) {
    case Model::Direct:
    case Model::DirectLens:
      return direct_potential(rho, field.sigma);
    case Model::Rescaled:
    case Model::RescaledLens:
    case Model::TrackedLens:
      if (field.sigma == 0.0) return log_potential(rho, log_floor);
      return rescaled_potential(rho, field.sigma);
    case Model::Log:
      return log_potential(rho, log_floor);
  }
  return 0.0;
}

}  // namespace

double kinetic_energy(const WaveField& field) {
  const auto s = spectrum_of(field);
  return 0.5 * parseval_weight(field.grid) * kernels::sum_k2_abs2(field.grid, s);
}

double gradient_norm(const WaveField& field) { return std::sqrt(2.0 * kinetic_energy(field)); }

double energy(const WaveField& field, double log_floor) {
  const Grid& g = field.grid;
  const double h = g.cell_volume();
  if (!is_lens(field.model)) {
    double pot = 0.0;
    for (const auto& z : field.values) pot += potential_density(field, std::norm(z), log_floor);
    return kinetic_energy(field) + h * pot;
  }

  // Lens frame: u(x) = tau^{-d/2} v(x/tau) exp(i tau_dot |x|^2 / (2 tau)) up to a
  // global gauge, so grad u = tau^{-d/2} (grad v / tau + i tau_dot y v).
  const double tau_d = std::pow(field.tau, g.dim);
  double pot = 0.0;
  for (const auto& z : field.values) pot += potential_density(field, std::norm(z) / tau_d, log_floor);
  return 0.5 * chirped_gradient_norm2(field, 1.0 / field.tau, field.tau_dot) + h * tau_d * pot;
}

double chirped_gradient_norm2(const WaveField& field, double lambda, double mu) {
  const Grid& g = field.grid;
  if (mu == 0.0) return lambda * lambda * 2.0 * kinetic_energy(field);
  const auto n = static_cast<std::size_t>(g.points_per_axis);
  double sum = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const auto dv = spectral_derivative(field, a);
    for (std::size_t i = 0; i < dv.size(); ++i) {
      const std::size_t j = g.dim == 1 ? i : (a == 0 ? i / n : i % n);
      sum += std::norm(lambda * dv[i] + cplx(0.0, mu * g.coords[j]) * field.values[i]);
    }
  }
  return g.cell_volume() * sum;
}

double physical_gradient_norm(const WaveField& field) {
  if (!is_lens(field.model)) return gradient_norm(field);
  return std::sqrt(chirped_gradient_norm2(field, 1.0 / field.tau, field.tau_dot));
}

double lp_norm(const WaveField& field, double p) {
  return std::pow(field.grid.cell_volume() * kernels::sum_abs_pow(field.values, p), 1.0 / p);
}

double weighted_norm(const WaveField& field) {
  return std::sqrt(field.grid.cell_volume() * kernels::sum_radius2_abs2(field.grid, field.values));
}

double edge_density(const WaveField& field) {
  const auto n = static_cast<std::size_t>(field.grid.points_per_axis);
  const auto& v = field.values;
  if (field.grid.dim == 1) return std::max(std::norm(v.front()), std::norm(v.back()));
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m = std::max({m, std::norm(v[j]), std::norm(v[(n - 1) * n + j]), std::norm(v[j * n]), std::norm(v[j * n + n - 1])});
  }
  return m;
}

double l2_distance(const WaveField& a, const WaveField& b) {
  if (a.values.size() != b.values.size()) throw GridError("fields live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(a.grid.cell_volume() * sum);
}

double mean_momentum(const WaveField& field, int axis) {
  const auto s = spectrum_of(field);
  const Grid& g = field.grid;
  const auto n = static_cast<std::size_t>(g.points_per_axis);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t j = g.dim == 1 ? i : (axis == 0 ? i / n : i % n);
    const double w = std::norm(s[i]);
    num += g.wavenumbers[j] * w;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

std::vector<cplx> spectral_derivative(const WaveField& field, int axis) {
  const Grid& g = field.grid;
  if (axis < 0 || axis >= g.dim) throw GridError("derivative axis out of range");
  auto s = spectrum_of(field);
  const auto n = static_cast<std::size_t>(g.points_per_axis);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t j = g.dim == 1 ? i : (axis == 0 ? i / n : i % n);
    const double k = j == n / 2 ? 0.0 : g.wavenumbers[j];
    s[i] *= cplx(0.0, k);
  }
  fft::inverse(g, s);
  return s;
}

}  // namespace nlsflow
