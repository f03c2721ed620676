#include "nlsflow/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsflow/error.hpp"
#include "nlsflow/fft.hpp"
#include "nlsflow/kernels.hpp"

namespace nlsflow {
namespace {

using kernels::Nonlinearity;
using kernels::PotentialPhase;

// i v_t + (c/2) Lap v = theta_rate(y, |v|^2) v over one step of length dt.
struct Coefficients {
  double kinetic = 1.0;
  PotentialPhase potential;  // already multiplied by dt
};

void split_step(const Grid& grid, std::vector<cplx>& v, double dt, const Coefficients& c, const StepPlan& plan) {
  std::span<cplx> s(v);
  if (plan.scheme == Scheme::Strang) {
    const double half = 0.25 * dt * c.kinetic;  // (dt/2) * c * k^2 / 2
    fft::forward(grid, s);
    kernels::apply_kinetic_phase(grid, s, half);
    fft::inverse(grid, s);
    kernels::apply_potential_phase(grid, s, c.potential);
    fft::forward(grid, s);
    kernels::apply_kinetic_phase(grid, s, half);
    if (plan.dealias) kernels::dealias(grid, s);
    fft::inverse(grid, s);
  } else {
    fft::forward(grid, s);
    kernels::apply_kinetic_phase(grid, s, 0.5 * dt * c.kinetic);
    if (plan.dealias) kernels::dealias(grid, s);
    fft::inverse(grid, s);
    kernels::apply_potential_phase(grid, s, c.potential);
  }
}

void check_finite(const WaveField& f) {
  const double total = kernels::sum_abs2(f.values);
  if (!std::isfinite(total)) throw SolverError("non-finite field (blow-up or under-resolution)", f.time);
}

PotentialPhase nonlinear_phase(const StepPlan& plan, Nonlinearity kind, double sigma, double rate) {
  PotentialPhase p;
  p.sigma = sigma;
  p.log_floor = plan.log_floor;
  if (plan.nonlinear) {
    p.kind = kind;
    p.nonlinear = rate * plan.dt;
  }
  return p;
}

WaveField advance(const WaveField& field, const StepPlan& plan, const Coefficients& c) {
  WaveField out = field;
  split_step(out.grid, out.values, plan.dt, c, plan);
  out.time = field.time + plan.dt;
  check_finite(out);
  return out;
}

void require_model(const WaveField& field, Model model, const char* op) {
  if (field.model != model)
    throw SolverError(std::string(op) + " called on a " + std::string(model_name(field.model)) + " field", field.time);
}

}  // namespace

void validate(const StepPlan& plan) {
  if (!(plan.dt != 0.0) || !std::isfinite(plan.dt)) throw SolverError("time step must be nonzero and finite", 0.0);
  if (!(plan.log_floor >= 0.0 && plan.log_floor <= 1e-6)) throw SolverError("log floor must lie in [0, 1e-6]", 0.0);
  if (plan.dt_growth < 0.0) throw SolverError("dt growth must be nonnegative", 0.0);
}

WaveField step_direct(const WaveField& field, const StepPlan& plan, double sigma) {
  require_model(field, Model::Direct, "step_direct");
  if (!(sigma > 0.0)) throw SolverError("direct model needs sigma > 0", field.time);
  Coefficients c;
  c.potential = nonlinear_phase(plan, Nonlinearity::Power, sigma, 1.0);
  return advance(field, plan, c);
}

WaveField step_rescaled(const WaveField& field, const StepPlan& plan, double sigma) {
  require_model(field, Model::Rescaled, "step_rescaled");
  if (!(sigma > 0.0)) throw SolverError("rescaled model needs sigma > 0 (use the log model at sigma = 0)", field.time);
  Coefficients c;
  c.potential = nonlinear_phase(plan, Nonlinearity::PowerMinusOne, sigma, 1.0);
  return advance(field, plan, c);
}

WaveField step_log(const WaveField& field, const StepPlan& plan) {
  require_model(field, Model::Log, "step_log");
  Coefficients c;
  c.potential = nonlinear_phase(plan, Nonlinearity::Log, 0.0, 1.0);
  return advance(field, plan, c);
}

WaveField step_lens(const WaveField& field, const StepPlan& plan, const EnvelopeState& env) {
  if (!is_lens(field.model) || field.model == Model::TrackedLens)
    throw SolverError("step_lens called on a non-lens field", field.time);
  if (!(env.tau > 0.0)) throw EnvelopeError("tau must be positive");
  const double sigma = field.sigma;
  const int d = field.grid.dim;
  const bool direct = field.model == Model::DirectLens;
  if (direct && !(sigma > 0.0)) throw SolverError("direct lens model needs sigma > 0", field.time);

  EnvelopeState frozen;
  EnvelopeState end;
  if (direct) {
    frozen = bracket_envelope(plan.potential_midpoint ? env.t + 0.5 * plan.dt : env.t, sigma, d);
    end = bracket_envelope(env.t + plan.dt, sigma, d);
  } else {
    const EnvelopeState mid = advance_envelope(env, 0.5 * plan.dt);
    frozen = plan.potential_midpoint ? mid : env;
    end = advance_envelope(mid, 0.5 * plan.dt);
  }

  const double tau = frozen.tau;
  const double weight = std::pow(tau, -d * sigma);
  Coefficients c;
  c.kinetic = 1.0 / (tau * tau);
  if (direct) {
    c.potential = nonlinear_phase(plan, Nonlinearity::Power, sigma, weight);
    c.potential.harmonic = plan.dt / (2.0 * tau * tau);
  } else {
    const auto kind = sigma > 0.0 ? Nonlinearity::PowerMinusOne : Nonlinearity::Log;
    c.potential = nonlinear_phase(plan, kind, sigma, weight);
    c.potential.harmonic = plan.dt * 0.25 * weight;
  }

  WaveField out = advance(field, plan, c);
  out.tau = end.tau;
  out.tau_dot = end.tau_dot;
  if (!direct) out.gauge = field.gauge + plan.dt * lens_gauge_rate(tau, sigma, d);
  return out;
}

namespace {

double mean_chirp(const WaveField& w) {
  const Grid& g = w.grid;
  const auto n = static_cast<std::size_t>(g.points_per_axis);
  double yj = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const auto dw = spectral_derivative(w, a);
    for (std::size_t i = 0; i < dw.size(); ++i) {
      const std::size_t j = g.dim == 1 ? i : (a == 0 ? i / n : i % n);
      yj += g.coords[j] * std::imag(std::conj(w.values[i]) * dw[i]);
    }
  }
  const double y2 = kernels::sum_radius2_abs2(g, w.values);
  return y2 > 0.0 ? -yj / y2 : 0.0;
}

}  // namespace

WaveField step_tracked(const WaveField& field, const StepPlan& plan) {
  if (field.model != Model::TrackedLens) throw SolverError("step_tracked called on a non-tracked field", field.time);
  const double sigma = field.sigma;
  const int d = field.grid.dim;
  const double dt = plan.dt;
  const double a0 = field.tau;
  const double b = field.tau_dot;
  const double a_mid = a0 + 0.5 * b * dt;
  const double a1 = a0 + b * dt;
  if (!(a0 > 0.0 && a_mid > 0.0 && a1 > 0.0)) throw EnvelopeError("tracked frame scale must stay positive");

  // Between re-gauges a(t) is linear, so the kinetic coefficient integrates exactly:
  // int ds / a(s)^2 = (t1 - t0) / (a(t0) a(t1)).
  WaveField out = field;
  std::span<cplx> v(out.values);
  const Grid& g = out.grid;
  const auto kind = sigma > 0.0 ? Nonlinearity::PowerMinusOne : Nonlinearity::Log;
  const auto potential = nonlinear_phase(plan, kind, sigma, std::pow(a_mid, -d * sigma));
  if (plan.scheme == Scheme::Strang) {
    fft::forward(g, v);
    kernels::apply_kinetic_phase(g, v, 0.25 * dt / (a0 * a_mid));
    fft::inverse(g, v);
    kernels::apply_potential_phase(g, v, potential);
    fft::forward(g, v);
    kernels::apply_kinetic_phase(g, v, 0.25 * dt / (a_mid * a1));
    if (plan.dealias) kernels::dealias(g, v);
    fft::inverse(g, v);
  } else {
    fft::forward(g, v);
    kernels::apply_kinetic_phase(g, v, 0.5 * dt / (a0 * a1));
    if (plan.dealias) kernels::dealias(g, v);
    fft::inverse(g, v);
    kernels::apply_potential_phase(g, v, potential);
  }
  out.time = field.time + dt;
  out.gauge = field.gauge + dt * lens_gauge_rate(a_mid, sigma, d);
  out.tau = a1;
  out.tau_dot = b;
  check_finite(out);

  // Exact re-gauge: move the mean chirp of w into the frame velocity.
  const double beta = mean_chirp(out);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= std::polar(1.0, 0.5 * beta * g.radius_squared(i));
  out.tau_dot = b - beta / a1;
  return out;
}

WaveField track(const WaveField& u) {
  if (u.model != Model::Rescaled && u.model != Model::Log)
    throw SolverError("tracked frames start from a rescaled or logarithmic field", u.time);
  WaveField w = u;
  w.model = Model::TrackedLens;
  w.tau = 1.0;
  w.tau_dot = 0.0;
  w.gauge = 0.0;
  return w;
}

EnvelopeState frame_of(const WaveField& field) {
  if (field.model == Model::DirectLens) return bracket_envelope(field.time, field.sigma, field.grid.dim);
  return {field.time, field.tau, field.tau_dot, field.sigma, field.grid.dim};
}

WaveField step(const WaveField& field, const StepPlan& plan) {
  switch (field.model) {
    case Model::Direct: return step_direct(field, plan, field.sigma);
    case Model::Rescaled: return step_rescaled(field, plan, field.sigma);
    case Model::Log: return step_log(field, plan);
    case Model::RescaledLens:
    case Model::DirectLens: return step_lens(field, plan, frame_of(field));
    case Model::TrackedLens: return step_tracked(field, plan);
  }
  throw SolverError("unknown model", field.time);
}

Observation observe(const WaveField& field, double log_floor) {
  return {field.time,      mass(field), energy(field, log_floor), gradient_norm(field),
          lp_norm(field, 2.0 * field.sigma + 2.0), edge_density(field)};
}

Evolution evolve(WaveField field, const StepPlan& plan, double t_end, std::span<const double> observe_times,
                 const Observer& observer) {
  validate(plan);
  if (!(plan.dt > 0.0)) throw SolverError("evolve needs dt > 0", field.time);
  if (t_end < field.time) throw SolverError("t_end before the current time", field.time);

  std::vector<double> targets;
  for (double t : observe_times)
    if (t > field.time && t < t_end) targets.push_back(t);
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Evolution ev{std::move(field), {}, 0};
  ev.log.push_back(observe(ev.field, plan.log_floor));
  if (observer) observer(ev.field);
  const double m0 = ev.log.front().mass;

  StepPlan local = plan;
  for (double target : targets) {
    if (target <= ev.field.time) continue;
    while (ev.field.time < target) {
      double dt = plan.dt;
      if (plan.dt_growth > 0.0) {
        dt = std::max(dt, plan.dt_growth * ev.field.time);
        if (plan.dt_max > 0.0) dt = std::min(dt, std::max(plan.dt, plan.dt_max));
      }
      const double remaining = target - ev.field.time;
      const bool last = remaining <= dt * (1.0 + 1e-9);
      local.dt = last ? remaining : dt;
      ev.field = step(ev.field, local);
      if (last) ev.field.time = target;
      ++ev.steps;
      if (m0 > 0.0) {
        const double m = mass(ev.field);
        if (std::abs(m - m0) > 1e-8 * m0) throw SolverError("mass drift tripwire", ev.field.time);
      }
    }
    ev.log.push_back(observe(ev.field, plan.log_floor));
    if (observer) observer(ev.field);
  }
  return ev;
}

}  // namespace nlsflow
