#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlsflow/grid.hpp"

namespace nlsflow {

// Inverse CDF of a 1D grid density read as piecewise constant on the cells
// [x_j - h/2, x_j + h/2). Both arrays have N + 1 entries; the quantile is
// linear in p between consecutive (probabilities[j], values[j]).
struct QuantileRep {
  std::vector<double> probabilities;
  std::vector<double> values;
};

QuantileRep quantile_rep(const Density& f);
// Cell masses recovered from the quantile function on the given 1D grid.
Density density_from_quantile(const QuantileRep& q, const Grid& grid);

// (int_0^1 |Q_f - Q_g|^p dp)^{1/p}, exact for the piecewise-linear quantiles.
double wasserstein_quantile(const QuantileRep& f, const QuantileRep& g, int p);

// Exact 1D distances. The two densities may live on different 1D grids.
double w1_1d(const Density& f, const Density& g);
double w2_1d(const Density& f, const Density& g);

struct SlicedEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int slices = 0;
  bool exact = false;  // true when a 1D input was routed to w1_1d
};

// Monte Carlo average over random directions of the 1D W1 between the
// projected cell masses. Slice k draws its angle from a substream derived from
// (seed, k), so the estimate does not depend on the thread count.
SlicedEstimate w1_sliced(const Density& f, const Density& g, int n_slices, std::uint64_t seed);

// W1 between radially symmetric 2D densities centred at the origin. It equals
// the 1D W1 of the laws of |x|: |.| is 1-Lipschitz and the radial map attains it.
double w1_radial(const Density& f, const Density& g);

// Homogeneous Sobolev norm (h^d / N^d sum |k|^{2s} |u_hat|^2)^{1/2}. For s < 0
// the input must have zero mean; the k = 0 mode is then dropped.
double sobolev_norm(const WaveField& field, double s);
double sobolev_norm(const Grid& grid, std::span<const double> real_values, double s);
// ||f - g|| in H^{-s}, homogeneous, for two normalized densities on one grid.
double negative_sobolev_distance(const Density& f, const Density& g, double s);

// Constant C with ||f - g||_{H^{-s}} <= C W1(f, g)^{1/2} for 1D probability
// densities whose W1 is at most w1_max, s in (1/2, 3/2). From
// |f_hat - g_hat| <= min(|k| W1, 2): ||f - g||^2 <= (B/pi) W1^{2s-1} with
// B = 2^{3-2s} (1/(3-2s) + 1/(2s-1)), and W1^{2s-1} <= w1_max^{2s-2} W1.
double hauray_mischler_constant(double s, double w1_max);

// lambda^{-d} Gamma(y / lambda) with Gamma(y) = exp(-|y|^2) / pi^{d/2}.
// Throws ResolutionError if the box holds fewer than 6 standard deviations or
// the grid sum misses 1 by more than 1e-12.
Density gaussian_gamma(const Grid& grid, double scale = 1.0);

}  // namespace nlsflow
