#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nlsflow/envelope.hpp"
#include "nlsflow/grid.hpp"

namespace nlsflow {

enum class Scheme { Strang, Lie };

struct StepPlan {
  double dt = 1e-3;
  Scheme scheme = Scheme::Strang;
  double log_floor = kDefaultLogFloor;
  bool potential_midpoint = true;  // freeze lens coefficients at t + dt/2 (else at t)
  bool nonlinear = true;           // false: free flow plus harmonic confinement only
  bool dealias = false;            // 2/3 mask after every step
  // evolve() only: dt_n = clamp(dt_growth * t_n, dt, dt_max) when dt_growth > 0.
  double dt_growth = 0.0;
  double dt_max = 0.0;
};

void validate(const StepPlan& plan);

// One step of the named equation. Every step scans for non-finite values and
// throws SolverError stamped with the time it happened.
WaveField step_direct(const WaveField& field, const StepPlan& plan, double sigma);
WaveField step_rescaled(const WaveField& field, const StepPlan& plan, double sigma);
WaveField step_log(const WaveField& field, const StepPlan& plan);
// env is the frame at field.time. RescaledLens: tau solves the dispersive ODE
// and sigma = 0 selects the logarithmic lens equation. DirectLens: tau = <t>.
WaveField step_lens(const WaveField& field, const StepPlan& plan, const EnvelopeState& env);

// Rescaled (sigma > 0) or logarithmic flow in a dilation frame: u(t, x) =
// a^{-d/2} w(t, x/a) exp(i (a'/a) |x|^2 / 2 + i gauge) with a linear in t over the
// step. Afterwards the mean chirp of w (least squares fit of the phase -beta |y|^2 / 2
// against the current) is moved into a', an exact change of variables. The frame
// then follows the spreading, so w keeps a bounded phase at any time.
WaveField step_tracked(const WaveField& field, const StepPlan& plan);

// TrackedLens copy of a Rescaled or Log field in the identity frame (a = 1, a' = 0).
WaveField track(const WaveField& u);

// Dispatches on field.model; lens fields use their own (t, tau, tau_dot) as frame.
WaveField step(const WaveField& field, const StepPlan& plan);

// Frame of a lens field at its time stamp (for TrackedLens, the tracking frame).
EnvelopeState frame_of(const WaveField& field);

struct Observation {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double lp_norm = 0.0;  // L^{2 sigma + 2}
  double edge_density = 0.0;
};

Observation observe(const WaveField& field, double log_floor = kDefaultLogFloor);

using Observer = std::function<void(const WaveField&)>;

struct Evolution {
  WaveField field;
  std::vector<Observation> log;
  long steps = 0;
};

// Steps from field.time to t_end, landing exactly on every observation time
// inside (field.time, t_end] and on t_end itself. The initial state is logged
// too. Mass drift beyond 1e-8 relative trips a SolverError.
Evolution evolve(WaveField field, const StepPlan& plan, double t_end, std::span<const double> observe_times = {},
                 const Observer& observer = {});

}  // namespace nlsflow
