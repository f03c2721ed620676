#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nlsflow {

using cplx = std::complex<double>;

inline constexpr double kDefaultLogFloor = 1e-12;

// Periodic box [-L, L)^dim with N points per axis. Wavenumbers are stored in
// FFT order: m = 0, 1, ..., N/2-1, -N/2, ..., -1 and k = (pi/L) m.
struct Grid {
  int dim = 1;
  int points_per_axis = 0;
  double half_length = 0.0;
  double spacing = 0.0;
  std::vector<double> coords;       // x_j = -L + j h
  std::vector<double> wavenumbers;  // FFT order

  std::size_t size() const noexcept;
  double cell_volume() const noexcept;
  double nyquist() const noexcept { return wavenumbers[static_cast<std::size_t>(points_per_axis / 2)]; }
  double max_wavenumber() const noexcept;

  // |x|^2 at flat index i (row-major, axis 0 slowest).
  double radius_squared(std::size_t i) const noexcept;
  double wavenumber_squared(std::size_t i) const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;
};

Grid make_grid(int dim, int n, double half_length);

enum class Model : std::uint32_t {
  Direct = 0,        // i u_t + 1/2 Lap u = |u|^{2 sigma} u
  Rescaled = 1,      // ... = (|u|^{2 sigma} - 1) u / sigma
  Log = 2,           // ... = u ln |u|^2
  RescaledLens = 3,  // v_sigma in the tau_sigma frame (sigma = 0: logarithmic frame)
  DirectLens = 4,    // v_sigma in the <t> frame of the power-law equation
  TrackedLens = 5,   // rescaled/log flow in a dilation frame that follows the solution
};

std::string_view model_name(Model model);
Model model_from_name(std::string_view name);
bool is_lens(Model model) noexcept;

// Complex state on a grid. Lens-model fields additionally carry the frame
// (tau, tau_dot) they are expressed in, and the global phase dropped from the
// rescaled lens equation; these are (1, 0, 0) for the other models.
struct WaveField {
  Grid grid;
  std::vector<cplx> values;
  double time = 0.0;
  double sigma = 0.0;
  Model model = Model::Direct;
  double tau = 1.0;
  double tau_dot = 0.0;
  double gauge = 0.0;

  WaveField() = default;
  WaveField(Grid g, double sigma_, Model model_, double time_ = 0.0);
};

// Grid function that is meant to be (or become) a probability density.
struct Density {
  Grid grid;
  std::vector<double> values;
  double integral = 0.0;  // h^d sum(values), measured when built

  void normalize();
  bool is_normalized(double tol = 1e-10) const;
};

Density make_density(Grid grid, std::vector<double> values);

WaveField zero_field(const Grid& grid, double sigma, Model model);

// L2-normalized exp(-|x-c|^2/(2a^2) + i p.x). center/phase_slope hold one
// entry per axis (an empty span means the origin).
WaveField gaussian_state(const Grid& grid, double width, std::span<const double> center = {},
                         std::span<const double> phase_slope = {}, double sigma = 0.0,
                         Model model = Model::Direct);

double mass(const WaveField& field);

// Total conserved energy of the physical equation behind field.model. For lens
// models this is the energy of the reconstructed u, evaluated in the frame.
double energy(const WaveField& field, double log_floor = kDefaultLogFloor);
// ||grad u|| of the physical field; for lens models ||grad v / tau + i tau_dot y v||.
double physical_gradient_norm(const WaveField& field);
// ||lambda grad f + i mu x f||^2.
double chirped_gradient_norm2(const WaveField& field, double lambda, double mu);

double kinetic_energy(const WaveField& field);  // 1/2 ||grad u||^2 of the stored values
double gradient_norm(const WaveField& field);   // ||grad u||_{L2}
double lp_norm(const WaveField& field, double p);
double weighted_norm(const WaveField& field);  // || |x| u ||_{L2}
double edge_density(const WaveField& field);   // max |u|^2 on the outermost layer
double l2_distance(const WaveField& a, const WaveField& b);
double mean_momentum(const WaveField& field, int axis = 0);

// Spectral derivative along an axis (Nyquist mode zeroed).
std::vector<cplx> spectral_derivative(const WaveField& field, int axis);

// Integrand helpers shared by the models. y >= 0.
// (y^s - 1)/s evaluated as expm1(s ln y)/s; the logarithmic limit below 1e-8.
double power_difference_quotient(double y, double s) noexcept;
// Potential energy densities F(rho) with F'(rho) the model nonlinearity.
double direct_potential(double rho, double sigma) noexcept;
double rescaled_potential(double rho, double sigma) noexcept;
double log_potential(double rho, double log_floor) noexcept;

}  // namespace nlsflow
