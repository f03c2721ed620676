#include "nlsflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "nlsflow/error.hpp"
#include "nlsflow/fft.hpp"

namespace nlsflow {
namespace {

constexpr double kNormTolerance = 1e-10;

void require_probability(const Density& f) {
  if (!f.is_normalized(kNormTolerance)) throw MetricError("density is not a normalized probability density");
}

void require_1d(const Density& f) {
  if (f.grid.dim != 1) throw MetricError("exact Wasserstein routines need 1D densities");
}

void require_same_grid(const Density& f, const Density& g) {
  if (!(f.grid == g.grid)) throw MetricError("densities live on different grids");
}

// int_a^b |l(p)| dp for l linear with end values da, db.
double abs_linear_integral(double width, double da, double db) {
  if ((da >= 0.0) == (db >= 0.0)) return width * 0.5 * (std::abs(da) + std::abs(db));
  return width * 0.5 * (da * da + db * db) / (std::abs(da) + std::abs(db));
}

double quantile_at(const QuantileRep& q, std::size_t i, double p) {
  const double p0 = q.probabilities[i], p1 = q.probabilities[i + 1];
  if (p1 <= p0) return q.values[i];
  return q.values[i] + (p - p0) / (p1 - p0) * (q.values[i + 1] - q.values[i]);
}

// W1 between two discrete 1D measures given as points with signed weights
// (weights of f minus weights of g): int |F - G| = sum |C_k| (s_{k+1} - s_k).
double signed_points_w1(std::vector<std::pair<double, double>>& points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double cumulative = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    cumulative += points[k].second;
    total += std::abs(cumulative) * (points[k + 1].first - points[k].first);
  }
  return total;
}

double sobolev_of(const Grid& grid, std::vector<cplx> data, double s) {
  if (!(s >= -2.0 && s <= 2.0)) throw MetricError("Sobolev index must lie in [-2, 2]");
  fft::forward(grid, data);
  double total = 0.0, all_modes = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double k2 = grid.wavenumber_squared(i);
    const double a2 = std::norm(data[i]);
    all_modes += a2;
    if (k2 == 0.0) continue;
    total += (s == 0.0 ? 1.0 : std::pow(k2, s)) * a2;
  }
  const double zero_mode = std::norm(data[0]);
  if (s < 0.0) {
    if (zero_mode > 1e-18 * all_modes) throw MetricError("negative Sobolev norms need a mean-zero input");
  } else if (s == 0.0) {
    total += zero_mode;
  }
  return std::sqrt(grid.cell_volume() / static_cast<double>(grid.size()) * total);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

QuantileRep quantile_rep(const Density& f) {
  require_1d(f);
  const Grid& g = f.grid;
  const std::size_t n = g.size();
  QuantileRep q;
  q.probabilities.resize(n + 1);
  q.values.resize(n + 1);
  double running = 0.0;
  q.probabilities[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(f.values[j] >= 0.0)) throw MetricError("density has negative or non-finite values");
    running += f.values[j];
    q.probabilities[j + 1] = running;
  }
  if (!(running > 0.0)) throw MetricError("density has no mass");
  for (double& p : q.probabilities) p /= running;
  q.probabilities[n] = 1.0;
  for (std::size_t j = 0; j <= n; ++j) q.values[j] = g.coords[0] - 0.5 * g.spacing + static_cast<double>(j) * g.spacing;
  return q;
}

Density density_from_quantile(const QuantileRep& q, const Grid& grid) {
  if (grid.dim != 1) throw MetricError("quantile reconstruction is 1D");
  const std::size_t n = grid.size();
  // CDF at the cell edges of the target grid, by inverting the quantile.
  std::vector<double> cdf(n + 1);
  std::size_t i = 0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double x = grid.coords[0] - 0.5 * grid.spacing + static_cast<double>(j) * grid.spacing;
    while (i + 1 < q.values.size() && q.values[i + 1] <= x) ++i;
    if (i + 1 >= q.values.size() || x <= q.values.front()) {
      cdf[j] = x <= q.values.front() ? 0.0 : 1.0;
      continue;
    }
    const double x0 = q.values[i], x1 = q.values[i + 1];
    cdf[j] = x1 > x0 ? q.probabilities[i] + (x - x0) / (x1 - x0) * (q.probabilities[i + 1] - q.probabilities[i])
                     : q.probabilities[i + 1];
  }
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) rho[j] = std::max(0.0, cdf[j + 1] - cdf[j]) / grid.spacing;
  return make_density(grid, std::move(rho));
}

double wasserstein_quantile(const QuantileRep& f, const QuantileRep& g, int p) {
  if (p != 1 && p != 2) throw MetricError("only W1 and W2 are implemented");
  std::vector<double> breaks;
  breaks.reserve(f.probabilities.size() + g.probabilities.size());
  std::merge(f.probabilities.begin(), f.probabilities.end(), g.probabilities.begin(), g.probabilities.end(),
             std::back_inserter(breaks));
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::size_t i = 0, j = 0;
  const std::size_t last_f = f.probabilities.size() - 2, last_g = g.probabilities.size() - 2;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    // Segments of zero width (empty cells) are skipped, so [a, b] sits inside
    // one linear piece of each quantile.
    while (i < last_f && f.probabilities[i + 1] <= a) ++i;
    while (j < last_g && g.probabilities[j + 1] <= a) ++j;
    const double da = quantile_at(f, i, a) - quantile_at(g, j, a);
    const double db = quantile_at(f, i, b) - quantile_at(g, j, b);
    const double w = b - a;
    total += p == 1 ? abs_linear_integral(w, da, db) : w * (da * da + da * db + db * db) / 3.0;
  }
  return p == 1 ? total : std::sqrt(total);
}

double w1_1d(const Density& f, const Density& g) {
  require_1d(f);
  require_1d(g);
  require_probability(f);
  require_probability(g);
  return wasserstein_quantile(quantile_rep(f), quantile_rep(g), 1);
}

double w2_1d(const Density& f, const Density& g) {
  require_1d(f);
  require_1d(g);
  require_probability(f);
  require_probability(g);
  const auto qf = quantile_rep(f);
  const auto qg = quantile_rep(g);
  const double w2 = wasserstein_quantile(qf, qg, 2);
#ifndef NDEBUG
  const double w1 = wasserstein_quantile(qf, qg, 1);
  if (w1 > w2 * (1.0 + 1e-12) + 1e-15) throw MetricError("W1 > W2: quantile integration is inconsistent");
#endif
  return w2;
}

SlicedEstimate w1_sliced(const Density& f, const Density& g, int n_slices, std::uint64_t seed) {
  if (f.grid.dim == 1) return {w1_1d(f, g), 0.0, 0, true};
  if (f.grid.dim != 2) throw MetricError("sliced W1 is implemented for d = 2");
  if (n_slices < 16) throw MetricError("sliced W1 needs at least 16 slices");
  require_same_grid(f, g);
  require_probability(f);
  require_probability(g);

  const Grid& grid = f.grid;
  const std::size_t n = grid.size();
  const auto nx = static_cast<std::size_t>(grid.points_per_axis);
  const double cell = grid.cell_volume();
  std::vector<double> per_slice(static_cast<std::size_t>(n_slices));

#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_slices; ++k) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k))));
    const double angle = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<std::pair<double, double>> pts(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const double x = grid.coords[idx / nx], y = grid.coords[idx % nx];
      pts[idx] = {c * x + s * y, cell * (f.values[idx] - g.values[idx])};
    }
    per_slice[static_cast<std::size_t>(k)] = signed_points_w1(pts);
  }

  const double mean = std::accumulate(per_slice.begin(), per_slice.end(), 0.0) / n_slices;
  double var = 0.0;
  for (double v : per_slice) var += (v - mean) * (v - mean);
  var /= std::max(1, n_slices - 1);
  return {mean, std::sqrt(var / n_slices), n_slices, false};
}

double w1_radial(const Density& f, const Density& g) {
  if (f.grid.dim != 2) throw MetricError("radial W1 is implemented for d = 2");
  require_same_grid(f, g);
  require_probability(f);
  require_probability(g);
  const Grid& grid = f.grid;
  const auto nx = static_cast<std::size_t>(grid.points_per_axis);
  const double cell = grid.cell_volume();

  // Cheap symmetry guard: centred and isotropic second moments.
  for (const Density* d : {&f, &g}) {
    double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const double x = grid.coords[idx / nx], y = grid.coords[idx % nx], w = cell * d->values[idx];
      mx += w * x;
      my += w * y;
      xx += w * x * x;
      yy += w * y * y;
    }
    if (std::abs(mx) + std::abs(my) > 1e-6 * std::sqrt(xx + yy) || std::abs(xx - yy) > 1e-6 * (xx + yy))
      throw MetricError("radial W1 needs densities radially symmetric about the origin");
  }

  std::vector<std::pair<double, double>> pts(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    pts[idx] = {std::sqrt(grid.radius_squared(idx)), cell * (f.values[idx] - g.values[idx])};
  return signed_points_w1(pts);
}

double sobolev_norm(const Grid& grid, std::span<const double> real_values, double s) {
  if (real_values.size() != grid.size()) throw GridError("value array does not match grid");
  return sobolev_of(grid, std::vector<cplx>(real_values.begin(), real_values.end()), s);
}

double sobolev_norm(const WaveField& field, double s) { return sobolev_of(field.grid, field.values, s); }

double negative_sobolev_distance(const Density& f, const Density& g, double s) {
  if (!(s > 0.0)) throw MetricError("negative_sobolev_distance takes s > 0 and evaluates H^{-s}");
  require_same_grid(f, g);
  require_probability(f);
  require_probability(g);
  // Renormalize so the difference has zero mean to roundoff.
  const double cf = f.grid.cell_volume() * std::accumulate(f.values.begin(), f.values.end(), 0.0);
  const double cg = g.grid.cell_volume() * std::accumulate(g.values.begin(), g.values.end(), 0.0);
  std::vector<double> diff(f.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f.values[i] / cf - g.values[i] / cg;
  return sobolev_norm(f.grid, diff, -s);
}

double hauray_mischler_constant(double s, double w1_max) {
  if (!(s > 0.5 && s < 1.5)) throw MetricError("the closed-form constant covers s in (1/2, 3/2)");
  if (!(w1_max > 0.0)) throw MetricError("w1_max must be positive");
  const double b = std::pow(2.0, 3.0 - 2.0 * s) * (1.0 / (3.0 - 2.0 * s) + 1.0 / (2.0 * s - 1.0));
  return std::sqrt(b / std::numbers::pi) * std::pow(w1_max, s - 1.0);
}

Density gaussian_gamma(const Grid& grid, double scale) {
  if (!(scale > 0.0)) throw MetricError("Gaussian scale must be positive");
  const double sd = scale / std::sqrt(2.0);
  if (grid.half_length < 6.0 * sd)
    throw ResolutionError("box holds fewer than 6 standard deviations of the Gaussian profile");
  const double norm = std::pow(std::numbers::pi * scale * scale, -0.5 * grid.dim);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = norm * std::exp(-grid.radius_squared(i) / (scale * scale));
  auto d = make_density(grid, std::move(values));
  if (std::abs(d.integral - 1.0) > 1e-12) throw ResolutionError("Gaussian profile truncated or undersampled");
  return d;
}

}  // namespace nlsflow
