#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlsflow/grid.hpp"
#include "nlsflow/propagators.hpp"

namespace nlsflow {

// sigma_0(d) = (2 - d + sqrt(d^2 + 12 d + 4)) / (4 d). Throws for d <= 0 and
// asserts 1/d < sigma_0 < 2/d.
double strauss_exponent(int dim);

// Interaction-picture profile e^{-i (t/2) Lap} u(t): multiplies u_hat by
// e^{+i t |k|^2 / 2}, the exact inverse of the solver's free flow over [0, t].
// The time stamp is kept so callers know where the profile was taken.
WaveField free_conjugate(const WaveField& u);

// Exact free flow e^{i (t/2) Lap} applied to a profile, stamped with time t.
WaveField free_evolve(const WaveField& profile, double t);

// ||f||^2 + ||grad f||^2 + || |x| f ||^2, square-rooted.
double sigma_norm(const WaveField& f);

enum class Direction { Plus, Minus };

struct AsymptoticState {
  WaveField state;
  double extraction_time = 0.0;
  double residual = 0.0;                 // last cadence-to-cadence L2 change
  std::vector<double> cadence_times;     // |T| of each profile
  std::vector<double> residual_history;  // one entry per cadence after the first
  bool converged = false;
  std::string report;
};

// Profiles free_conjugate(u(T_j)) at dyadic times (ascending |T|). Accepts when
// the last three residuals strictly decrease, or the last one is <= 1e-10;
// otherwise reports "no scattering detected". The state is the last profile
// plus a geometric tail estimate when tail_ratio in (0, 1) is given.
// Short-range sigma > sigma_0(d) is required unless long_range is set.
AsymptoticState extract_asymptotic(std::span<const WaveField> trajectory, Direction direction,
                                   bool long_range = false, double tail_ratio = 0.0);

// u(-t) = conj(v(t)) with v solving the same equation from conj(u0). Returns
// the fields at -t for each t in times (positive, ascending).
std::vector<WaveField> evolve_backward(const WaveField& u0, const StepPlan& plan, std::span<const double> times);

// Largest dyadic T = 2^j <= t_cap whose free evolution of the profile keeps the
// edge density below tol.
double free_time_limit(const WaveField& profile, double tol = 1e-12, double t_cap = 1024.0);

// ||int_0^T |u_free|^{2 sigma} u_free ds|| bound: int_0^T || |u_free|^{2 sigma+1} ||_{L2} ds
// over the free flow of phi, divided by ||phi||, both time directions.
double picard_ratio(const WaveField& phi, double sigma, double t_max);

// Amplitude A making picard_ratio(A phi) equal target (ratio scales as A^{2 sigma}),
// capped at 1.
double small_data_amplitude(const WaveField& phi, double sigma, double t_max, double target = 0.1);

struct ScatteringOptions {
  StepPlan plan;
  double t0 = 1.0;           // first dyadic cadence
  double t_max = 0.0;        // 0: free_time_limit of u_minus
  int max_refinements = 5;
  double refinement_tol = 1e-12;  // relative datum change that ends refinement
};

struct ScatteringResult {
  AsymptoticState plus;
  WaveField u0;                          // W_- u_minus
  std::vector<double> refinement_defects;  // relative datum corrections
  double backward_residual = 0.0;          // relative mismatch at -T/2 after refinement
  double t_max = 0.0;
};

// S_sigma u_minus. u_minus is a Direct-model profile; sigma is the power.
// Wave operator by backward refinement at -T with a geometric tail, then
// forward evolution to +T and extraction. Throws ScatteringError tagged
// "wave-operator" or "extraction" when either stage fails.
ScatteringResult scattering_map(const WaveField& u_minus, double sigma, const ScatteringOptions& options);

struct ContinuityRow {
  double nu = 0.0;
  double sup_l2 = 0.0;        // sup_t ||e^{-itLap/2}(u_nu - u_sigma)||_{L2}
  double sup_sigma = 0.0;     // same in the Sigma norm
  double argmax_t = 0.0;
  double sup_l2_half = 0.0;   // sup over the first half of the dyadic grid
  std::vector<double> l2_by_time;
};

struct ContinuityReport {
  double sigma = 0.0;
  std::vector<double> times;
  std::vector<ContinuityRow> rows;
  double theta_hat = 0.0;  // slope of log sup_l2 against log |nu - sigma|
  double theta_r2 = 0.0;
  double max_saturation_change = 0.0;  // max over rows of |sup - sup_half| / sup
};

// Sigma norm of the interaction-picture profile of a field. For a DirectLens
// field w (the <t> frame) this is evaluated from w itself:
// ||w||^2 + ||grad w / <t> + i (t/<t>) y w||^2 + ||y w / <t> + i (t/<t>) grad w||^2.
double interaction_sigma_norm(const WaveField& w);

// Evolves phi under sigma and every nu (identical data) and compares the
// interaction-picture profiles on the dyadic times. phi may be a Direct field
// or a DirectLens field; the lens form reaches long times in a small box. For
// real data u(-t) is the conjugate of u(t), so t >= 0 covers the whole line.
ContinuityReport interaction_picture_continuity(const WaveField& phi, double sigma, std::span<const double> nu_list,
                                                const StepPlan& plan, std::span<const double> times);

}  // namespace nlsflow
