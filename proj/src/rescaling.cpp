#include "nlsflow/rescaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsflow/error.hpp"
#include "nlsflow/metrics.hpp"
#include "nlsflow/fft.hpp"

namespace nlsflow {
namespace {

// The cubic fallback is only fourth-order accurate, so it gets a looser mass guard.
constexpr double kTransformMassTolerance = 1e-8;
constexpr double kCubicMassTolerance = 1e-4;

// Trigonometric interpolant of one periodic line at the given points. The
// Nyquist coefficient is split evenly between +N/2 and -N/2 (a cosine).
void spectral_line(const Grid& line_grid, std::vector<cplx>& line, std::span<const double> points, cplx* out,
                   std::size_t stride) {
  fft::forward(line_grid, line);
  const auto n = line.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double dk = std::numbers::pi / line_grid.half_length;
  const double L = line_grid.half_length;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double x = points[p];
    if (!(x >= -L && x < L)) {
      out[p * stride] = cplx{};
      continue;
    }
    const double shift = x + L;
    cplx sum = line[0];
    cplx zp{1.0, 0.0};
    cplx zm{1.0, 0.0};
    const cplx w = std::polar(1.0, dk * shift);
    const cplx wc = std::conj(w);
    for (std::size_t m = 1; m < n / 2; ++m) {
      if (m % 64 == 0) {
        zp = std::polar(1.0, dk * shift * static_cast<double>(m));
        zm = std::conj(zp);
      } else {
        zp *= w;
        zm *= wc;
      }
      sum += line[m] * zp + line[n - m] * zm;
    }
    sum += line[n / 2] * std::cos(dk * shift * static_cast<double>(n / 2));
    out[p * stride] = sum * inv_n;
  }
}

void cubic_line(const Grid& line_grid, const std::vector<cplx>& line, std::span<const double> points, cplx* out,
                std::size_t stride) {
  const auto n = static_cast<long>(line.size());
  const double L = line_grid.half_length;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double x = points[p];
    if (!(x >= -L && x < L)) {
      out[p * stride] = cplx{};
      continue;
    }
    const double s = (x + L) / line_grid.spacing;
    const auto j = static_cast<long>(std::floor(s));
    const double f = s - static_cast<double>(j);
    auto at = [&](long i) { return line[static_cast<std::size_t>(((i % n) + n) % n)]; };
    const double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    const double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    const double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    const double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    out[p * stride] = w0 * at(j - 1) + w1 * at(j) + w2 * at(j + 1) + w3 * at(j + 2);
  }
}

void interpolate_line(const Grid& line_grid, std::vector<cplx> line, std::span<const double> points, cplx* out,
                      std::size_t stride, Interpolation interp) {
  if (interp == Interpolation::Spectral)
    spectral_line(line_grid, line, points, out, stride);
  else
    cubic_line(line_grid, line, points, out, stride);
}

Model lens_model_of(const WaveField& u) {
  switch (u.model) {
    case Model::Direct: return Model::DirectLens;
    case Model::Rescaled:
    case Model::Log: return Model::RescaledLens;
    default: throw GridError("lens_forward expects a physical (non-lens) field");
  }
}

Model physical_model_of(const WaveField& v) {
  switch (v.model) {
    case Model::DirectLens: return Model::Direct;
    case Model::RescaledLens:
    case Model::TrackedLens: return v.sigma > 0.0 ? Model::Rescaled : Model::Log;
    default: throw GridError("lens_backward expects a lens field");
  }
}

void check_transform_mass(const WaveField& in, const WaveField& out, Interpolation interp) {
  const double a = mass(in);
  const double b = mass(out);
  const double tol = interp == Interpolation::Cubic ? kCubicMassTolerance : kTransformMassTolerance;
  if (std::abs(a - b) > tol * std::max(a, 1e-300))
    throw ResolutionError("lens transform changed the mass from " + std::to_string(a) + " to " + std::to_string(b) +
                          " (support outside the box or undersampled)");
}

std::vector<double> scaled_coords(const Grid& g, double factor) {
  std::vector<double> p(g.coords);
  for (double& x : p) x *= factor;
  return p;
}

double nonlinear_quotient(double rho, double sigma) {
  if (rho == 0.0) return 0.0;
  return power_difference_quotient(rho, sigma);
}

std::vector<double> derivative_of_real(const Grid& g, const std::vector<double>& f, int axis) {
  WaveField w(g, 0.0, Model::Direct);
  for (std::size_t i = 0; i < f.size(); ++i) w.values[i] = f[i];
  const auto d = spectral_derivative(w, axis);
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

}  // namespace

std::vector<cplx> resample(const WaveField& f, std::span<const double> points, Interpolation interp) {
  const Grid& g = f.grid;
  const auto n = static_cast<std::size_t>(g.points_per_axis);
  const Grid line_grid = g.dim == 1 ? g : make_grid(1, g.points_per_axis, g.half_length);
  if (g.dim == 1) {
    std::vector<cplx> out(points.size());
    interpolate_line(line_grid, f.values, points, out.data(), 1, interp);
    return out;
  }
  // Tensor product: axis 1 first (rows), then axis 0 (columns).
  const std::size_t p = points.size();
  std::vector<cplx> rows(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<cplx> line(f.values.begin() + static_cast<long>(i * n), f.values.begin() + static_cast<long>((i + 1) * n));
    interpolate_line(line_grid, std::move(line), points, rows.data() + i * p, 1, interp);
  }
  std::vector<cplx> out(p * p);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<cplx> line(n);
    for (std::size_t i = 0; i < n; ++i) line[i] = rows[i * p + j];
    interpolate_line(line_grid, std::move(line), points, out.data() + j, p, interp);
  }
  return out;
}

WaveField lens_forward(const WaveField& u, const EnvelopeState& env, Interpolation interp) {
  if (!(env.tau > 0.0)) throw EnvelopeError("tau must be positive");
  const Model target = lens_model_of(u);
  const Grid& g = u.grid;
  const double tau = env.tau;
  const auto values = resample(u, scaled_coords(g, tau), interp);

  WaveField v(g, u.sigma, target, u.time);
  v.tau = tau;
  v.tau_dot = env.tau_dot;
  v.gauge = 0.0;
  const double amp = std::pow(tau, 0.5 * g.dim);
  const double chirp = env.tau_dot * tau / 2.0;  // (tau'/tau) |y tau|^2 / 2
  for (std::size_t i = 0; i < values.size(); ++i)
    v.values[i] = amp * values[i] * std::polar(1.0, -chirp * g.radius_squared(i));
  check_transform_mass(u, v, interp);
  return v;
}

WaveField lens_backward(const WaveField& v, const EnvelopeState& env, Interpolation interp) {
  if (!(env.tau > 0.0)) throw EnvelopeError("tau must be positive");
  const Model target = physical_model_of(v);
  const Grid& g = v.grid;
  const double tau = env.tau;
  const auto values = resample(v, scaled_coords(g, 1.0 / tau), interp);

  WaveField u(g, v.sigma, target, v.time);
  const double amp = std::pow(tau, -0.5 * g.dim);
  const double chirp = env.tau_dot / (2.0 * tau);
  for (std::size_t i = 0; i < values.size(); ++i)
    u.values[i] = amp * values[i] * std::polar(1.0, chirp * g.radius_squared(i) + v.gauge);
  check_transform_mass(v, u, interp);
  return u;
}

Density normalized_density(const WaveField& u, double scale, Interpolation interp) {
  if (!(scale > 0.0)) throw NormalizationError("scale must be positive");
  if (!(mass(u) > 0.0)) throw NormalizationError("zero field has no density");
  const Grid& g = u.grid;
  const auto values = resample(u, scaled_coords(g, scale), interp);
  const double amp = std::pow(scale, g.dim);
  std::vector<double> rho(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rho[i] = amp * std::norm(values[i]);
  Density d = make_density(g, std::move(rho));
  d.normalize();
  return d;
}

Density density_of(const WaveField& v) {
  std::vector<double> rho(v.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(v.values[i]);
  Density d = make_density(v.grid, std::move(rho));
  d.normalize();
  return d;
}

PseudoEnergy pseudo_energy(const WaveField& v, const EnvelopeState& env) {
  if (!(env.tau > 0.0)) throw EnvelopeError("tau must be positive");
  const FrameView m = frame_view(v, env);
  const double sigma = v.sigma;
  const double tau = env.tau;
  const double weight = std::pow(tau, -v.grid.dim * sigma);
  const double scale_d = std::pow(m.lambda, v.grid.dim);

  PseudoEnergy e;
  e.kinetic = 0.5 * chirped_gradient_norm2(v, m.lambda, m.kappa / m.lambda) / (tau * tau);
  const double y2 = weighted_norm(v) / m.lambda;
  e.confinement = y2 * y2 * weight / 4.0;
  double plus = 0.0;
  double minus = 0.0;
  for (const auto& z : v.values) {
    const double rho = std::norm(z);
    const double q = nonlinear_quotient(scale_d * rho, sigma) * rho;
    if (scale_d * rho >= 1.0)
      plus += q;
    else
      minus -= q;
  }
  const double factor = v.grid.cell_volume() * weight / (sigma + 1.0);
  e.nonlinear_plus = plus * factor;
  e.nonlinear_minus = minus * factor;
  e.total = e.kinetic + e.confinement + e.nonlinear_plus - e.nonlinear_minus;
  return e;
}

UniformBounds uniform_bounds(const WaveField& v, const EnvelopeState& env) {
  const FrameView m = frame_view(v, env);
  const double a = v.grid.dim * v.sigma;
  const double scale_d = std::pow(m.lambda, v.grid.dim);
  UniformBounds b;
  b.gradient = chirped_gradient_norm2(v, m.lambda, m.kappa / m.lambda) / std::pow(env.tau, 2.0 - a);
  const double y = weighted_norm(v) / m.lambda;
  b.weighted = y * y;
  double sum = 0.0;
  for (const auto& z : v.values) {
    const double rho = std::norm(z);
    sum += std::abs(nonlinear_quotient(scale_d * rho, v.sigma)) * rho;
  }
  b.nonlinear = sum * v.grid.cell_volume();
  return b;
}

FrameView frame_view(const WaveField& v, const EnvelopeState& env) {
  if (!is_lens(v.model)) throw GridError("frame views need a lens field");
  if (!(env.tau > 0.0 && v.tau > 0.0)) throw EnvelopeError("tau must be positive");
  FrameView m;
  m.lambda = env.tau / v.tau;
  m.kappa = env.tau * (v.tau_dot * m.lambda - env.tau_dot);
  return m;
}

QuantileRep frame_quantile(const WaveField& v, const EnvelopeState& env) {
  if (v.grid.dim != 1) throw GridError("frame quantiles are one-dimensional");
  const FrameView m = frame_view(v, env);
  QuantileRep q = quantile_rep(density_of(v));
  for (auto& x : q.values) x /= m.lambda;
  return q;
}

HydroFields hydro(const WaveField& v) {
  std::vector<double> rho(v.values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(v.values[i]);
  HydroFields out{make_density(v.grid, std::move(rho)), {}, v.grid, v.time};
  for (int a = 0; a < v.grid.dim; ++a) {
    const auto dv = spectral_derivative(v, a);
    std::vector<double> j(dv.size());
    for (std::size_t i = 0; i < dv.size(); ++i) j[i] = (std::conj(v.values[i]) * dv[i]).imag();
    out.current.push_back(std::move(j));
  }
  return out;
}

double continuity_residual(const WaveField& before, const WaveField& at, const WaveField& after, double tau) {
  const double dt2 = after.time - before.time;
  if (!(dt2 > 0.0)) throw GridError("snapshots must be in increasing time order");
  const auto fields = hydro(at);
  std::vector<double> div(at.values.size(), 0.0);
  for (int a = 0; a < at.grid.dim; ++a) {
    const auto d = derivative_of_real(at.grid, fields.current[static_cast<std::size_t>(a)], a);
    for (std::size_t i = 0; i < d.size(); ++i) div[i] += d[i];
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < div.size(); ++i) {
    const double dt_rho = (std::norm(after.values[i]) - std::norm(before.values[i])) / dt2;
    const double r = dt_rho + div[i] / (tau * tau);
    sum += r * r;
  }
  return std::sqrt(sum * at.grid.cell_volume());
}

DispersiveBoundReport dispersive_bound_check(std::span<const WaveField> trajectory, double sigma) {
  if (trajectory.empty()) throw GridError("empty trajectory");
  const int d = trajectory.front().grid.dim;
  DispersiveBoundReport rep;
  rep.exponent = std::max(0.0, 1.0 - d * sigma / 2.0);
  const double t_last = trajectory.back().time;
  double partial = 0.0;
  double t_prev = 0.0;
  for (const auto& v : trajectory) {
    const double bracket = std::sqrt(1.0 + v.time * v.time);
    const double ratio = gradient_norm(v) / std::pow(bracket, rep.exponent);
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    if (v.time <= 0.5 * t_last) rep.sup_ratio_half = std::max(rep.sup_ratio_half, ratio);

    const auto fields = hydro(v);
    double l1 = 0.0;
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      double s = 0.0;
      for (const auto& j : fields.current) s += j[i] * j[i];
      l1 += std::sqrt(s);
    }
    l1 *= v.grid.cell_volume();
    partial += (v.time - t_prev) * l1 / (bracket * bracket);
    t_prev = v.time;
    rep.current_partial_sums.push_back(partial);
  }
  rep.stable = rep.sup_ratio <= 1.2 * rep.sup_ratio_half;
  return rep;
}

double cazenave_haraux_lhs(cplx z1, cplx z2) {
  const auto s = [](cplx z) { return z == cplx{} ? cplx{} : z * std::log(std::norm(z)); };
  return std::imag((s(z2) - s(z1)) * std::conj(z2 - z1));
}

}  // namespace nlsflow
