#pragma once

#include <span>
#include <vector>

#include "nlsflow/envelope.hpp"
#include "nlsflow/grid.hpp"
#include "nlsflow/metrics.hpp"

// Lens change of unknowns
//   u(t, x) = tau^{-d/2} v(t, x/tau) exp(i (tau'/tau) |x|^2 / 2) exp(i gauge),
// densities in the rescaled variable y = x/tau, the pseudo-energy of the lens
// equation and its Madelung fields.
namespace nlsflow {

enum class Interpolation { Spectral, Cubic };

// Lens frame of the physical field u at env: Direct -> DirectLens, Rescaled/Log -> RescaledLens.
// Off-grid samples of u use trigonometric (or cubic) interpolation; samples outside the
// box are taken as zero. Throws ResolutionError when the transform loses mass (support
// pushed outside the box or undersampled).
WaveField lens_forward(const WaveField& u, const EnvelopeState& env, Interpolation interp = Interpolation::Spectral);
WaveField lens_backward(const WaveField& v, const EnvelopeState& env, Interpolation interp = Interpolation::Spectral);

// Values of a field at arbitrary points (one coordinate per axis, tensor grid in 2D).
std::vector<cplx> resample(const WaveField& f, std::span<const double> points, Interpolation interp);

// y -> tau^d |u(y tau)|^2 / ||u||^2 on the same grid.
Density normalized_density(const WaveField& u, double scale, Interpolation interp = Interpolation::Spectral);
// |v|^2 / ||v||^2 for a field already in lens variables.
Density density_of(const WaveField& v);

struct PseudoEnergy {
  double kinetic = 0.0;          // ||grad v||^2 / (2 tau^2)
  double confinement = 0.0;      // ||y v||^2 / (4 tau^{d sigma})
  double nonlinear_plus = 0.0;   // over |v| >= 1
  double nonlinear_minus = 0.0;  // over |v| < 1, sign flipped
  double total = 0.0;            // kinetic + confinement + plus - minus
  double plus() const { return kinetic + confinement + nonlinear_plus; }
};

// Nonlinear integrand (|v|^{2 sigma} - 1)/sigma |v|^2 / ((sigma + 1) tau^{d sigma});
// sigma = 0 uses |v|^2 ln |v|^2. The field may live in another lens frame than
// env (a TrackedLens field, say); it is then viewed in env through frame_view.
PseudoEnergy pseudo_energy(const WaveField& v, const EnvelopeState& env);

// The three quantities bounded uniformly in t: ||grad v||^2 / tau^{2 - d sigma},
// ||y v||^2 and int |(|v|^{2 sigma} - 1)/sigma| |v|^2.
struct UniformBounds {
  double gradient = 0.0;
  double weighted = 0.0;
  double nonlinear = 0.0;
};

UniformBounds uniform_bounds(const WaveField& v, const EnvelopeState& env);

// A lens field v stored in frame (v.tau, v.tau_dot) seen in the frame env:
// v_env(y) = lambda^{d/2} v(lambda y) exp(i kappa |y|^2 / 2) with lambda = tau_env / v.tau
// and kappa = tau_env (v.tau_dot lambda - tau_dot_env). The identity when env is v's own frame.
struct FrameView {
  double lambda = 1.0;
  double kappa = 0.0;
};
FrameView frame_view(const WaveField& v, const EnvelopeState& env);

// Quantile function of the normalized density of v seen in the frame env (1D).
QuantileRep frame_quantile(const WaveField& v, const EnvelopeState& env);

struct HydroFields {
  Density rho;                               // |v|^2, not renormalized
  std::vector<std::vector<double>> current;  // Im(conj(v) d_a v), one array per axis
  Grid grid;
  double time = 0.0;
};

HydroFields hydro(const WaveField& v);

// || (rho(t+dt) - rho(t-dt)) / (2 dt) + tau(t)^{-2} div J(t) ||_{L2}.
double continuity_residual(const WaveField& before, const WaveField& at, const WaveField& after, double tau);

// Im((z2 ln|z2|^2 - z1 ln|z1|^2)(conj z2 - conj z1)), evaluated as written. The
// logarithmic nonlinearity keeps it below 2 |z2 - z1|^2. Zero arguments use z ln|z|^2 = 0.
double cazenave_haraux_lhs(cplx z1, cplx z2);

struct DispersiveBoundReport {
  double exponent = 0.0;        // max(0, 1 - d sigma / 2)
  double sup_ratio = 0.0;       // sup_t ||grad v|| / <t>^exponent over the whole trajectory
  double sup_ratio_half = 0.0;  // same over the first half of the time range
  bool stable = false;          // sup_ratio <= 1.2 sup_ratio_half
  std::vector<double> current_partial_sums;  // sum over dyadic t of <t>^{-2} ||j||_{L1}
};

// trajectory: DirectLens fields (tau = <t>) at increasing dyadic times.
DispersiveBoundReport dispersive_bound_check(std::span<const WaveField> trajectory, double sigma);

}  // namespace nlsflow
