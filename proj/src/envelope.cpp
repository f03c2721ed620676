#include "nlsflow/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsflow/error.hpp"

namespace nlsflow {
namespace {

constexpr double kSecondOrderHorizon = 1e3;

// x'' = c / (2 x^{p+1}) with first integral x'^2 = F(x).
struct Envelope {
  double c;
  double p;

  double accel(double x) const { return 0.5 * c * std::exp(-(p + 1.0) * std::log(x)); }

  double integral(double x) const {
    if (p == 0.0) return c * std::log(x);
    return -(c / p) * std::expm1(-p * std::log(x));
  }
};

Envelope tau_envelope(double sigma, int dim) { return {1.0, dim * sigma}; }

struct Phase {
  double x;
  double v;
};

Phase rk4(const Envelope& e, Phase s, double h) {
  const double k1x = s.v, k1v = e.accel(s.x);
  const double k2x = s.v + 0.5 * h * k1v, k2v = e.accel(s.x + 0.5 * h * k1x);
  const double k3x = s.v + 0.5 * h * k2v, k3v = e.accel(s.x + 0.5 * h * k2x);
  const double k4x = s.v + h * k3v, k4v = e.accel(s.x + h * k3x);
  return {s.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x), s.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

// RK4 for x' = sqrt(F(x)), valid once x > 1.
double rk4_first_order(const Envelope& e, double x, double h) {
  auto f = [&](double y) { return std::sqrt(std::max(0.0, e.integral(y))); };
  const double k1 = f(x);
  const double k2 = f(x + 0.5 * h * k1);
  const double k3 = f(x + 0.5 * h * k2);
  const double k4 = f(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw EnvelopeError("empty time grid");
  if (t_grid.front() < 0.0) throw EnvelopeError("time grid must start at t >= 0");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw EnvelopeError("time grid must be sorted");
  if (!std::isfinite(t_grid.back())) throw EnvelopeError("time grid must be finite");
}

// Integrates from (0, 1, 0) and returns (t, x, x') at every requested time.
template <class Emit>
void integrate(const Envelope& e, std::span<const double> t_grid, Emit&& emit) {
  check_grid(t_grid);
  const double t_max = t_grid.back();
  const double h = std::min(1e-3, std::max(t_max, 1e-300) * 1e-6);
  if (!(h > 0.0)) throw EnvelopeError("step size underflow");

  double t = 0.0;
  Phase s{1.0, 0.0};
  for (double target : t_grid) {
    const double second_order_end = std::min(target, kSecondOrderHorizon);
    if (second_order_end > t) {
      const double span = second_order_end - t;
      const auto n = std::max(1L, static_cast<long>(std::ceil(span / h - 1e-9)));
      const double step = span / static_cast<double>(n);
      for (long k = 0; k < n; ++k) s = rk4(e, s, step);
      t = second_order_end;
    }
    while (t < target) {
      const double step = std::min(1e-3 * t, target - t);
      s.x = rk4_first_order(e, s.x, step);
      t = (target - t <= step) ? target : t + step;
      s.v = std::sqrt(std::max(0.0, e.integral(s.x)));
    }
    if (!std::isfinite(s.x) || !std::isfinite(s.v)) throw EnvelopeError("non-finite envelope at t=" + std::to_string(t));
    emit(target, s.x, s.v);
  }
}

}  // namespace

double first_integral_residual(const EnvelopeState& s) {
  return s.tau_dot * s.tau_dot - tau_envelope(s.sigma, s.dim).integral(s.tau);
}

double first_integral_residual(const RState& s) {
  return s.r_dot * s.r_dot - Envelope{s.alpha, s.alpha}.integral(s.r);
}

std::vector<EnvelopeState> integrate_tau(double sigma, int dim, std::span<const double> t_grid) {
  if (!(sigma >= 0.0)) throw EnvelopeError("sigma must be nonnegative");
  if (dim < 1) throw EnvelopeError("dimension must be positive");
  std::vector<EnvelopeState> out;
  out.reserve(t_grid.size());
  integrate(tau_envelope(sigma, dim), t_grid,
            [&](double t, double x, double v) { out.push_back({t, x, v, sigma, dim}); });
  return out;
}

std::vector<RState> integrate_r(double alpha, std::span<const double> t_grid) {
  if (!(alpha > 0.0)) throw EnvelopeError("alpha must be positive");
  std::vector<RState> out;
  out.reserve(t_grid.size());
  integrate(Envelope{alpha, alpha}, t_grid, [&](double t, double x, double v) { out.push_back({t, x, v, alpha}); });
  return out;
}

EnvelopeState tau_from_r(const RState& r, double sigma, int dim) {
  const double alpha = dim * sigma;
  if (!(sigma > 0.0)) throw EnvelopeError("tau_from_r needs sigma > 0");
  if (std::abs(r.alpha - alpha) > 1e-14 * alpha) throw EnvelopeError("r trajectory has alpha != d sigma");
  const double lambda = std::sqrt(alpha);
  return {r.t * lambda, r.r, r.r_dot / lambda, sigma, dim};
}

EnvelopeState advance_envelope(const EnvelopeState& s, double dt) {
  if (!(s.tau > 0.0)) throw EnvelopeError("tau must be positive");
  if (dt == 0.0) return s;
  const Envelope e = tau_envelope(s.sigma, s.dim);
  const double scale = 1e-3 * std::max(1.0, std::min(s.t, s.t + dt));
  const auto n = std::max(1L, static_cast<long>(std::ceil(std::abs(dt) / scale)));
  const double h = dt / static_cast<double>(n);
  Phase p{s.tau, s.tau_dot};
  for (long k = 0; k < n; ++k) p = rk4(e, p, h);
  return {s.t + dt, p.x, p.v, s.sigma, s.dim};
}

EnvelopeState bracket_envelope(double t, double sigma, int dim) {
  const double b = std::sqrt(1.0 + t * t);
  return {t, b, t / b, sigma, dim};
}

double lens_gauge_rate(double tau, double sigma, int dim) {
  const double a = dim * sigma;
  if (a == 0.0) return dim * std::log(tau);
  return -std::expm1(-a * std::log(tau)) / sigma;
}

double lens_gauge_phase(double sigma, int dim, double t) {
  if (!(t >= 0.0)) throw EnvelopeError("gauge phase needs t >= 0");
  if (t == 0.0) return 0.0;
  // Composite Simpson on the integrated envelope.
  const auto n = 2 * std::max(8L, static_cast<long>(std::ceil(t / 1e-2)));
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = t * static_cast<double>(i) / static_cast<double>(n);
  const auto traj = integrate_tau(sigma, dim, grid);
  double sum = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * lens_gauge_rate(traj[static_cast<std::size_t>(i)].tau, sigma, dim);
  }
  return sum * (t / static_cast<double>(n)) / 3.0;
}

double time_change_s(const EnvelopeState& s) {
  const double a = s.dim * s.sigma;
  if (!(s.sigma > 0.0)) throw EnvelopeError("time change needs sigma > 0");
  if (a == 1.0) throw EnvelopeError("time change undefined for d sigma = 1");
  if (!(s.t > 0.0)) throw EnvelopeError("time change diverges to -infinity at t = 0");
  const double f = tau_envelope(s.sigma, s.dim).integral(s.tau);
  return std::log(f) / (4.0 * (1.0 - a));
}

double time_change_s_limit(double sigma, int dim) {
  const double a = dim * sigma;
  if (!(sigma > 0.0) || a == 1.0) throw EnvelopeError("time change limit needs sigma > 0 and d sigma != 1");
  return std::log(1.0 / a) / (4.0 * (1.0 - a));
}

TauDifferenceReport tau_difference_bound(double sigma, double t_max, int dim) {
  if (!(sigma > 0.0) || !(dim * sigma < 1.0)) throw EnvelopeError("tau difference bound needs sigma in (0, 1/d)");
  if (!(t_max > 0.0)) throw EnvelopeError("t_max must be positive");

  // 200 log-spaced samples per decade from 1e-3 up to 2 t_max.
  std::vector<double> grid{0.0};
  const double lo = -3.0;
  const double hi = std::log10(2.0 * t_max);
  const int count = static_cast<int>(std::ceil((hi - lo) * 200.0));
  for (int i = 0; i <= count; ++i) grid.push_back(std::pow(10.0, lo + (hi - lo) * i / count));
  grid.back() = 2.0 * t_max;
  grid.push_back(t_max);
  std::sort(grid.begin(), grid.end());

  const auto a = integrate_tau(sigma, dim, grid);
  const auto b = integrate_tau(0.0, dim, grid);
  TauDifferenceReport rep;
  rep.sigma = sigma;
  rep.t_max = t_max;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const double diff = std::abs(a[i].tau - b[i].tau);
    const double ratio = diff / (sigma * t * std::pow(std::log(t + 2.0), 1.5));
    rep.sup_ratio_doubled = std::max(rep.sup_ratio_doubled, ratio);
    if (t <= t_max) {
      if (ratio > rep.sup_ratio) {
        rep.sup_ratio = ratio;
        rep.argmax_t = t;
      }
      rep.sup_abs_difference = std::max(rep.sup_abs_difference, diff);
    }
  }
  rep.stable = rep.sup_ratio > 0.0 && std::abs(rep.sup_ratio_doubled - rep.sup_ratio) <= 0.2 * rep.sup_ratio;
  return rep;
}

}  // namespace nlsflow
