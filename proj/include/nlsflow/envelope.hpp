#pragma once

#include <span>
#include <vector>

// Dispersive envelopes. tau solves tau'' = 1/(2 tau^{d sigma + 1}), r_alpha solves
// r'' = alpha/(2 r^{alpha+1}); both start at (1, 0). The first integrals
//   tau'^2 = (1 - tau^{-d sigma})/(d sigma)   (tau'^2 = ln tau when sigma = 0)
//   r'^2   = 1 - r^{-alpha}
// are used as tests, never enforced on the second-order integration.
namespace nlsflow {

struct EnvelopeState {
  double t = 0.0;
  double tau = 1.0;
  double tau_dot = 0.0;
  double sigma = 0.0;
  int dim = 1;
};

struct RState {
  double t = 0.0;
  double r = 1.0;
  double r_dot = 0.0;
  double alpha = 1.0;
};

// tau'^2 minus the first-integral right-hand side.
double first_integral_residual(const EnvelopeState& s);
double first_integral_residual(const RState& s);

// RK4 with fixed step min(1e-3, t_max 1e-6) up to t = 1e3; beyond that the
// first-order form tau' = sqrt(F(tau)) is stepped with h = 1e-3 t.
std::vector<EnvelopeState> integrate_tau(double sigma, int dim, std::span<const double> t_grid);
std::vector<RState> integrate_r(double alpha, std::span<const double> t_grid);

// tau_sigma(t) = r_{d sigma}(t / sqrt(d sigma)).
EnvelopeState tau_from_r(const RState& r, double sigma, int dim);

// Advance a tau trajectory by dt (either sign) with RK4 substeps of relative size 1e-3.
EnvelopeState advance_envelope(const EnvelopeState& s, double dt);

// Frame of the power-law lens: tau = <t> = sqrt(1 + t^2).
EnvelopeState bracket_envelope(double t, double sigma, int dim);

// The rescaled lens equation drops the time-dependent potential (1 - tau^{-d sigma})/sigma
// (d ln tau at sigma = 0); the physical field picks up exp(i theta) with theta' = that rate.
double lens_gauge_rate(double tau, double sigma, int dim);
double lens_gauge_phase(double sigma, int dim, double t);

// Compactified time s(t) = ln(F(tau)) / (4 (1 - d sigma)), sigma > 0, d sigma != 1, t > 0.
double time_change_s(const EnvelopeState& s);
double time_change_s_limit(double sigma, int dim);

struct TauDifferenceReport {
  double sigma = 0.0;
  double t_max = 0.0;
  double sup_ratio = 0.0;          // sup_{t <= t_max} |tau_sigma - tau_0| / (sigma t ln(t+2)^{3/2})
  double sup_ratio_doubled = 0.0;  // same over t <= 2 t_max
  double argmax_t = 0.0;
  double sup_abs_difference = 0.0;  // sup_{t <= t_max} |tau_sigma - tau_0|
  bool stable = false;              // doubled sup within 20% of sup
};

TauDifferenceReport tau_difference_bound(double sigma, double t_max, int dim = 1);

}  // namespace nlsflow
