#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nlsflow/error.hpp"
#include "nlsflow/kernels.hpp"
#include "nlsflow/metrics.hpp"

using namespace nlsflow;
using std::numbers::pi;

namespace {

Density gaussian_density(const Grid& g, double m, double s) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g.coords[i] - m;
    v[i] = std::exp(-x * x / (2.0 * s * s)) / (s * std::sqrt(2.0 * pi));
  }
  auto d = make_density(g, std::move(v));
  d.normalize();
  return d;
}

Density random_density(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = u(rng) < 0.3 ? 0.0 : u(rng);  // some empty cells
  auto d = make_density(g, std::move(v));
  d.normalize();
  return d;
}

// Mixture of a few Gaussian bumps, smooth enough for Fourier-side checks.
Density random_mixture(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-5.0, 5.0), w(0.3, 1.5), a(0.1, 1.0);
  std::vector<double> v(g.size(), 0.0);
  for (int b = 0; b < 3; ++b) {
    const double m = c(rng), s = w(rng), amp = a(rng);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += amp * std::exp(-std::pow(g.coords[i] - m, 2) / (2 * s * s));
  }
  auto d = make_density(g, std::move(v));
  d.normalize();
  return d;
}

Density point_cells(const Grid& g, const std::vector<std::pair<std::size_t, double>>& atoms) {
  std::vector<double> v(g.size(), 0.0);
  for (auto [j, m] : atoms) v[j] += m / g.spacing;
  return make_density(g, std::move(v));
}

}  // namespace

TEST_CASE("quantile representation") {
  const Grid g = make_grid(1, 256, 8.0);
  std::mt19937_64 rng(3);
  const auto f = random_density(g, rng);
  const auto q = quantile_rep(f);
  CHECK(q.probabilities.size() == g.size() + 1);
  CHECK(q.probabilities.front() == 0.0);
  CHECK(q.probabilities.back() == 1.0);
  CHECK(std::is_sorted(q.values.begin(), q.values.end()));
  CHECK(std::is_sorted(q.probabilities.begin(), q.probabilities.end()));
  const auto back = density_from_quantile(q, g);
  CHECK(w1_1d(f, back) <= g.spacing);
}

TEST_CASE("W1 and W2 trivial values") {
  const Grid g = make_grid(1, 256, 4.0);
  const auto f = gaussian_density(g, 0.0, 0.7);
  CHECK(w1_1d(f, f) == 0.0);
  CHECK(w2_1d(f, f) == 0.0);

  // Uniform on [0, 1) against uniform on [a, 1 + a), a a multiple of h.
  auto uniform_at = [&](double start) {
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (g.coords[i] >= start - 1e-12 && g.coords[i] < start + 1.0 - 1e-12) v[i] = 1.0;
    auto d = make_density(g, std::move(v));
    d.normalize();
    return d;
  };
  const double a = 40 * g.spacing;
  CHECK(w1_1d(uniform_at(0.0), uniform_at(a)) == doctest::Approx(a).epsilon(1e-12));
  CHECK(w2_1d(uniform_at(0.0), uniform_at(a)) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("unnormalized or multi-dimensional input is rejected") {
  const Grid g = make_grid(1, 64, 4.0);
  auto f = gaussian_density(g, 0.0, 1.0);
  auto bad = f;
  for (auto& x : bad.values) x *= 2.0;
  CHECK_THROWS_AS(w1_1d(f, bad), MetricError);
  CHECK_THROWS_AS(w2_1d(bad, f), MetricError);
  const auto f2 = gaussian_gamma(make_grid(2, 64, 8.0));
  CHECK_THROWS_AS(w1_1d(f2, f2), MetricError);
}

TEST_CASE("two-point densities against brute-force transport") {
  // Atoms sit on cell centres; each cell carries its mass uniformly, which can
  // only lower W1, by at most h/2 per sign change of F - G.
  const Grid g = make_grid(1, 512, 10.0);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> cell(20, 490);
  std::uniform_real_distribution<double> mass_dist(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t x1 = cell(rng), x2 = cell(rng), y1 = cell(rng), y2 = cell(rng);
    const double p = mass_dist(rng), q = mass_dist(rng);
    const auto f = point_cells(g, {{x1, p}, {x2, 1.0 - p}});
    const auto h = point_cells(g, {{y1, q}, {y2, 1.0 - q}});
    // Plan: pi11 from x1 to y1, the other entries fixed by the marginals.
    const double lo = std::max(0.0, p + q - 1.0), hi = std::min(p, q);
    double best = 1e300;
    for (int k = 0; k <= 20000; ++k) {
      const double p11 = lo + (hi - lo) * k / 20000.0;
      const double p12 = p - p11, p21 = q - p11, p22 = 1.0 - p - q + p11;
      auto d = [&](std::size_t i, std::size_t j) { return std::abs(g.coords[i] - g.coords[j]); };
      best = std::min(best, p11 * d(x1, y1) + p12 * d(x1, y2) + p21 * d(x2, y1) + p22 * d(x2, y2));
    }
    const double w = w1_1d(f, h);
    CHECK(w <= best + 1e-12);
    CHECK(w >= best - 2.0 * g.spacing);
  }
}

TEST_CASE("Gaussian W2 closed form") {
  const Grid g = make_grid(1, 65536, 12.0);
  const double m1 = 0.3, s1 = 1.0, m2 = -0.5, s2 = 0.7;
  const double w2 = w2_1d(gaussian_density(g, m1, s1), gaussian_density(g, m2, s2));
  CHECK(std::abs(w2 - std::hypot(m1 - m2, s1 - s2)) <= 1e-8);
}

TEST_CASE("metric axioms and W1 <= W2 on random densities") {
  const Grid g = make_grid(1, 128, 5.0);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_density(g, rng);
    const auto h = random_density(g, rng);
    const auto k = random_density(g, rng);
    for (auto dist : {&w1_1d, &w2_1d}) {
      const double fh = dist(f, h), hf = dist(h, f), fk = dist(f, k), hk = dist(h, k);
      CHECK(fh > 1e-12);
      CHECK(std::abs(fh - hf) <= 1e-10);
      CHECK(fk <= fh + hk + 1e-10);
      CHECK(dist(f, f) <= 1e-12);
    }
    CHECK(w1_1d(f, h) <= w2_1d(f, h) * (1.0 + 1e-12));
  }
}

TEST_CASE("translation equivariance and scaling") {
  const Grid g = make_grid(1, 1024, 10.0);
  const auto f = gaussian_density(g, 0.0, 0.8);
  for (double a : {0.013, 0.5, -1.77}) {
    const auto shifted = gaussian_density(g, a, 0.8);
    CHECK(std::abs(w1_1d(f, shifted) - std::abs(a)) <= g.spacing);
    CHECK(std::abs(w2_1d(f, shifted) - std::abs(a)) <= g.spacing);
  }

  // lambda f(lambda x): the same cell values on a grid shrunk by lambda.
  std::mt19937_64 rng(5);
  const auto p = random_mixture(g, rng), q = random_mixture(g, rng);
  for (double lambda : {0.5, 2.0, 3.0}) {
    const Grid gs = make_grid(1, 1024, 10.0 / lambda);
    auto scale = [&](const Density& d) {
      std::vector<double> v(d.values);
      for (auto& x : v) x *= lambda;
      return make_density(gs, std::move(v));
    };
    CHECK(w1_1d(scale(p), scale(q)) == doctest::Approx(w1_1d(p, q) / lambda).epsilon(1e-10));
    // Resampled analytically on the original grid instead.
    const auto fl = gaussian_density(g, 0.0, 0.8 / lambda), hl = gaussian_density(g, 1.0 / lambda, 0.5 / lambda);
    const auto f1 = gaussian_density(g, 0.0, 0.8), h1 = gaussian_density(g, 1.0, 0.5);
    CHECK(std::abs(w1_1d(fl, hl) - w1_1d(f1, h1) / lambda) <= g.spacing);
  }
}

TEST_CASE("densities on different 1D grids") {
  const auto a = gaussian_density(make_grid(1, 512, 10.0), 0.2, 1.0);
  const auto b = gaussian_density(make_grid(1, 2048, 12.0), 0.2, 1.0);
  CHECK(w1_1d(a, b) <= 20.0 / 512);
  const auto c = gaussian_density(make_grid(1, 2048, 12.0), 0.7, 1.0);
  CHECK(std::abs(w1_1d(a, c) - 0.5) <= 20.0 / 512);
}

TEST_CASE("sliced and radial W1 in 2D") {
  const Grid g = make_grid(2, 128, 8.0);
  const auto f = gaussian_gamma(g);
  const auto same = w1_sliced(f, f, 32, 1);
  CHECK(same.estimate == 0.0);
  CHECK(same.stderr_ == 0.0);

  // Translated bump: every projection is shifted by a |cos theta|, so the
  // sliced value is a E|cos| = 2a/pi while the true W1 is a.
  const double a = 1.0;
  std::vector<double> v(g.size());
  const auto nx = static_cast<std::size_t>(g.points_per_axis);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g.coords[i / nx] - a, y = g.coords[i % nx];
    v[i] = std::exp(-(x * x + y * y)) / pi;
  }
  const auto shifted = make_density(g, std::move(v));
  const auto est = w1_sliced(f, shifted, 256, 42);
  CHECK(std::abs(est.estimate - 2.0 * a / pi) <= 4.0 * est.stderr_ + 1e-3);

  // Dilation by lambda: radial W1 = (lambda - 1) E|X| = (lambda - 1) sqrt(pi)/2,
  // and each projection contributes (lambda - 1) E|<X, theta>|.
  const double lambda = 1.5;
  const auto wide = gaussian_gamma(g, lambda);
  const double radial = w1_radial(f, wide);
  CHECK(radial == doctest::Approx((lambda - 1.0) * std::sqrt(pi) / 2.0).epsilon(1e-3));
  const auto sl = w1_sliced(f, wide, 64, 9);
  CHECK(sl.estimate <= radial);
  CHECK(sl.estimate == doctest::Approx(radial * 2.0 / pi).epsilon(1e-3));

  CHECK_THROWS_AS(w1_radial(f, shifted), MetricError);
  CHECK_THROWS_AS(w1_sliced(f, wide, 8, 1), MetricError);
}

TEST_CASE("sliced estimator is deterministic in the seed and the thread count") {
  const Grid g = make_grid(2, 64, 8.0);
  const auto f = gaussian_gamma(g), h = gaussian_gamma(g, 1.3);
  const int before = kernels::thread_limit();
  kernels::set_thread_limit(1);
  const auto one = w1_sliced(f, h, 40, 1234);
  kernels::set_thread_limit(4);
  const auto four = w1_sliced(f, h, 40, 1234);
  kernels::set_thread_limit(before);
  CHECK(one.estimate == four.estimate);
  CHECK(one.stderr_ == four.stderr_);
  CHECK(w1_sliced(f, h, 40, 1235).estimate != one.estimate);

  const Grid g1 = make_grid(1, 128, 8.0);
  const auto r = w1_sliced(gaussian_gamma(g1), gaussian_gamma(g1, 1.2), 40, 1);
  CHECK(r.exact);
  CHECK(r.estimate == w1_1d(gaussian_gamma(g1), gaussian_gamma(g1, 1.2)));
}

TEST_CASE("Sobolev norms") {
  const Grid g = make_grid(1, 512, 12.0);
  const double a = 0.9;
  const auto u = gaussian_state(g, a);
  CHECK(sobolev_norm(u, 0.0) == doctest::Approx(std::sqrt(mass(u))).epsilon(1e-12));
  CHECK(sobolev_norm(u, 1.0) == doctest::Approx(std::sqrt(1.0 / (2.0 * a * a))).epsilon(1e-10));
  CHECK_THROWS_AS(sobolev_norm(u, -1.0), MetricError);
  CHECK_THROWS_AS(sobolev_norm(u, 2.5), MetricError);

  const Grid g2 = make_grid(2, 64, 8.0);
  CHECK(sobolev_norm(gaussian_state(g2, a), 1.0) == doctest::Approx(std::sqrt(2.0 / (2.0 * a * a))).epsilon(1e-10));
}

TEST_CASE("Hauray-Mischler constant matches its defining integral") {
  // C^2 w = (1/pi) int_0^inf min(k^2 w^2, 4) k^{-2s} dk at w = w1_max.
  for (double s : {0.8, 1.1, 1.3}) {
    const double w = 3.0;
    double integral = 0.0;
    const int n = 400000;
    const double kmax = 2e4;
    // Substitute k = e^x to resolve both ends.
    const double x0 = std::log(1e-8), x1 = std::log(kmax), dx = (x1 - x0) / n;
    for (int i = 0; i < n; ++i) {
      const double k = std::exp(x0 + (i + 0.5) * dx);
      integral += std::min(k * k * w * w, 4.0) * std::pow(k, -2.0 * s) * k * dx;
    }
    integral += 4.0 * std::pow(kmax, 1.0 - 2.0 * s) / (2.0 * s - 1.0);       // tail beyond kmax
    integral += w * w * std::pow(1e-8, 3.0 - 2.0 * s) / (3.0 - 2.0 * s);  // head below 1e-8
    const double c = hauray_mischler_constant(s, w);
    CHECK(c * c * w == doctest::Approx(integral / pi).epsilon(1e-4));
  }
}

TEST_CASE("H^{-s} distance is controlled by W1^{1/2} with one constant") {
  const Grid g = make_grid(1, 512, 10.0);
  const double s = 1.1;  // (d + 1)/2 + 0.1 for d = 1
  const double c = hauray_mischler_constant(s, 2.0 * g.half_length);
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_mixture(g, rng), h = random_mixture(g, rng);
    const double ratio = negative_sobolev_distance(f, h, s) / std::sqrt(w1_1d(f, h));
    worst = std::max(worst, ratio);
  }
  CHECK(worst <= c);
  CHECK(worst > 0.0);
}

TEST_CASE("Gaussian reference profile") {
  for (int dim : {1, 2}) {
    const Grid g = make_grid(dim, dim == 1 ? 256 : 64, 12.0);
    for (double scale : {1.0, 2.0}) {
      const auto gamma = gaussian_gamma(g, scale);
      CHECK(std::abs(gamma.integral - 1.0) <= 1e-12);
      CHECK(gamma.is_normalized(1e-12));
      double second = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) second += g.radius_squared(i) * gamma.values[i];
      second *= g.cell_volume();
      CHECK(second == doctest::Approx(dim / 2.0 * scale * scale).epsilon(1e-10));
    }
    // Gamma(0) = pi^{-d/2}; the origin is a grid point.
    std::size_t origin = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.radius_squared(i) == 0.0) origin = i;
    CHECK(gaussian_gamma(g).values[origin] == doctest::Approx(std::pow(pi, -dim / 2.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(gaussian_gamma(make_grid(1, 256, 3.0)), ResolutionError);
}
