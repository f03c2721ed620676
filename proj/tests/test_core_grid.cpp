#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlsflow/error.hpp"
#include "nlsflow/grid.hpp"

using namespace nlsflow;
using std::numbers::pi;

TEST_CASE("make_grid lattice for N=8, L=4") {
  const Grid g = make_grid(1, 8, 4.0);
  CHECK(g.spacing == 1.0);
  CHECK(g.spacing * g.points_per_axis == 2.0 * g.half_length);
  const std::vector<int> m{0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t j = 0; j < 8; ++j) CHECK(g.wavenumbers[j] == doctest::Approx(pi / 4.0 * m[j]).epsilon(1e-15));
  CHECK(g.coords.front() == -4.0);
  CHECK(g.coords.back() == 3.0);
}

TEST_CASE("make_grid spacing and rejection") {
  CHECK(make_grid(1, 256, 20.0).spacing == 0.15625);
  CHECK_THROWS_AS(make_grid(3, 16, 1.0), GridError);
  CHECK_THROWS_AS(make_grid(1, 100, 1.0), GridError);
  CHECK_THROWS_AS(make_grid(1, 4, 1.0), GridError);
  CHECK_THROWS_AS(make_grid(1, 64, -1.0), GridError);
}

TEST_CASE("wavenumber lattice is symmetric except the Nyquist mode") {
  const Grid g = make_grid(1, 64, 7.5);
  for (int j = 1; j < 32; ++j) CHECK(g.wavenumbers[static_cast<std::size_t>(j)] == -g.wavenumbers[static_cast<std::size_t>(64 - j)]);
  CHECK(g.nyquist() == doctest::Approx(-pi / 7.5 * 32));
}

TEST_CASE("make_grid is pure") {
  CHECK(make_grid(2, 32, 3.3) == make_grid(2, 32, 3.3));
  CHECK(make_grid(1, 512, 11.0).cell_volume() == make_grid(1, 512, 11.0).spacing);
  CHECK(make_grid(2, 16, 2.0).cell_volume() == 0.25 * 0.25);
}

TEST_CASE("gaussian_state normalization, momentum and resolution guard") {
  const Grid g = make_grid(1, 256, 20.0);
  for (double a : {0.5, 1.0, 2.0, 3.0}) CHECK(std::abs(mass(gaussian_state(g, a)) - 1.0) <= 1e-12);

  // For exp(-x^2/(2a^2) + i p x) the momentum density |u_hat|^2 is a Gaussian centred at p.
  const std::vector<double> p{1.0};
  CHECK(mean_momentum(gaussian_state(g, 1.0, {}, p)) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(gaussian_state(make_grid(1, 64, 20.0), 1e-3), ResolutionError);

  const Grid g2 = make_grid(2, 64, 8.0);
  const std::vector<double> c{0.5, -0.25};
  CHECK(std::abs(mass(gaussian_state(g2, 1.0, c)) - 1.0) <= 1e-12);
}

TEST_CASE("mass is quadratic and zero on the vacuum") {
  const Grid g = make_grid(1, 128, 10.0);
  CHECK(mass(zero_field(g, 1.0, Model::Direct)) == 0.0);
  auto f = gaussian_state(g, 1.0);
  const double m = mass(f);
  for (auto& z : f.values) z *= 2.0;
  CHECK(mass(f) == doctest::Approx(4.0 * m).epsilon(1e-14));
}

TEST_CASE("energy of a Gaussian against closed-form integrals") {
  // phi = (pi a^2)^{-1/4} exp(-x^2/(2a^2)):
  //   1/2 ||phi'||^2 = 1/(4 a^2),  1/2 int |phi|^4 = 1/(2 a sqrt(2 pi)).
  const Grid g = make_grid(1, 512, 20.0);
  for (double a : {0.7, 1.0, 1.6}) {
    const auto f = gaussian_state(g, a, {}, {}, 1.0, Model::Direct);
    const double kinetic = 1.0 / (4.0 * a * a);
    const double potential = 1.0 / (2.0 * a * std::sqrt(2.0 * pi));
    CHECK(kinetic_energy(f) == doctest::Approx(kinetic).epsilon(1e-12));
    CHECK(energy(f) == doctest::Approx(kinetic + potential).epsilon(1e-12));
  }
  CHECK(energy(zero_field(g, 1.0, Model::Direct)) == 0.0);
  CHECK(energy(zero_field(g, 0.3, Model::Rescaled)) == 0.0);
  CHECK(energy(zero_field(g, 0.0, Model::Log)) == 0.0);
}

TEST_CASE("log-model energy of a Gaussian") {
  // int |phi|^2 (ln |phi|^2 - 1) = -1/2 ln(pi a^2) - 1/2 - 1 for the normalized Gaussian.
  const Grid g = make_grid(1, 512, 20.0);
  const double a = 1.0;
  const auto f = gaussian_state(g, a, {}, {}, 0.0, Model::Log);
  const double expected = 1.0 / (4.0 * a * a) - 0.5 * std::log(pi * a * a) - 1.5;
  CHECK(energy(f, 0.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(energy(f, 1e-12) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("rescaled energy tends to the log energy as sigma -> 0") {
  const Grid g = make_grid(1, 256, 15.0);
  const auto log_field = gaussian_state(g, 1.0, {}, {}, 0.0, Model::Log);
  const double e0 = energy(log_field, 0.0);
  double previous = 1.0;
  for (double s : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto f = gaussian_state(g, 1.0, {}, {}, s, Model::Rescaled);
    const double gap = std::abs(energy(f) - e0);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("Parseval: spectral gradient matches a finite-difference gradient to O(h^2)") {
  double previous = 0.0;
  for (int n : {64, 128, 256}) {
    const Grid g = make_grid(1, n, 12.0);
    const auto f = gaussian_state(g, 1.0);
    double fd = 0.0;
    for (int j = 0; j < n; ++j) {
      const auto jp = static_cast<std::size_t>((j + 1) % n);
      const auto jm = static_cast<std::size_t>((j + n - 1) % n);
      fd += std::norm((f.values[jp] - f.values[jm]) / (2.0 * g.spacing));
    }
    fd *= g.spacing;
    const double spectral = gradient_norm(f) * gradient_norm(f);
    const double err = std::abs(spectral - fd);
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("stable difference quotient") {
  CHECK(power_difference_quotient(1.0, 0.3) == 0.0);
  CHECK(power_difference_quotient(2.0, 1e-9) == std::log(2.0));
  // Series oracle: (y^s - 1)/s = ln y + s ln^2 y / 2 + s^2 ln^3 y / 6 + ...
  const double y = 3.7, s = 1e-6, l = std::log(y);
  CHECK(power_difference_quotient(y, s) == doctest::Approx(l + s * l * l / 2.0 + s * s * l * l * l / 6.0).epsilon(1e-14));
  CHECK(power_difference_quotient(0.0, 0.5) == -2.0);
  CHECK(rescaled_potential(0.0, 0.0) == 0.0);
  CHECK(log_potential(0.0, 1e-12) == 0.0);
}

TEST_CASE("density normalization certificate") {
  const Grid g = make_grid(1, 64, 4.0);
  auto d = make_density(g, std::vector<double>(64, 3.0));
  CHECK(d.integral == doctest::Approx(3.0 * 8.0));
  CHECK_FALSE(d.is_normalized());
  d.normalize();
  CHECK(d.is_normalized(1e-10));
  CHECK_THROWS_AS(make_density(g, std::vector<double>(64, 0.0)).normalize(), NormalizationError);
  CHECK_THROWS_AS(make_density(g, std::vector<double>(64, -1.0)), NormalizationError);
}

TEST_CASE("edge density and weighted norm") {
  const Grid g = make_grid(1, 256, 20.0);
  const auto f = gaussian_state(g, 1.0);
  CHECK(edge_density(f) < 1e-100);
  // || x phi ||^2 = a^2 / 2.
  CHECK(weighted_norm(f) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
}
