#include "nlsflow/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlsflow/error.hpp"
#include "nlsflow/fft.hpp"
#include "nlsflow/fit.hpp"
#include "nlsflow/kernels.hpp"

namespace nlsflow {
namespace {

WaveField free_multiplier(const WaveField& u, double t) {
  WaveField out = u;
  fft::forward(out.grid, out.values);
  kernels::apply_kinetic_phase(out.grid, out.values, 0.5 * t);  // e^{-i t |k|^2 / 2}
  fft::inverse(out.grid, out.values);
  return out;
}

WaveField difference(const WaveField& a, const WaveField& b) {
  WaveField d = a;
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
  return d;
}

void axpy(WaveField& y, cplx a, const WaveField& x) {
  for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * x.values[i];
}

void require_physical(const WaveField& u, const char* what) {
  if (is_lens(u.model)) throw ScatteringError("input", std::string(what) + " works in physical variables only");
}

}  // namespace

double strauss_exponent(int dim) {
  if (dim <= 0) throw ScatteringError("input", "dimension must be positive");
  const double d = dim;
  const double s0 = (2.0 - d + std::sqrt(d * d + 12.0 * d + 4.0)) / (4.0 * d);
  if (!(s0 > 1.0 / d && s0 < 2.0 / d)) throw ScatteringError("input", "Strauss exponent outside (1/d, 2/d)");
  return s0;
}

WaveField free_conjugate(const WaveField& u) {
  WaveField out = free_multiplier(u, -u.time);
  out.time = u.time;
  return out;
}

WaveField free_evolve(const WaveField& profile, double t) {
  WaveField out = free_multiplier(profile, t);
  out.time = t;
  return out;
}

double sigma_norm(const WaveField& f) {
  const double g = gradient_norm(f), w = weighted_norm(f);
  return std::sqrt(mass(f) + g * g + w * w);
}

AsymptoticState extract_asymptotic(std::span<const WaveField> trajectory, Direction direction, bool long_range,
                                   double tail_ratio) {
  if (trajectory.size() < 2) throw ScatteringError("extraction", "need at least two cadences");
  const WaveField& first = trajectory.front();
  require_physical(first, "extract_asymptotic");
  if (first.model == Model::Direct && !long_range && !(first.sigma > strauss_exponent(first.grid.dim)))
    throw ScatteringError("extraction", "sigma <= sigma_0(d); pass long_range for a negative control");
  const double sign = direction == Direction::Plus ? 1.0 : -1.0;

  AsymptoticState out;
  WaveField previous;
  for (std::size_t j = 0; j < trajectory.size(); ++j) {
    const WaveField& u = trajectory[j];
    const double t = sign * u.time;
    if (!(t > 0.0)) throw ScatteringError("extraction", "cadence times must have the direction's sign");
    if (j > 0 && !(t > out.cadence_times.back())) throw ScatteringError("extraction", "cadences must grow in |t|");
    WaveField profile = free_conjugate(u);
    if (j > 0) out.residual_history.push_back(l2_distance(profile, previous));
    out.cadence_times.push_back(t);
    if (j + 1 == trajectory.size()) {
      out.state = profile;
      if (tail_ratio > 0.0 && tail_ratio < 1.0) axpy(out.state, tail_ratio / (1.0 - tail_ratio), difference(profile, previous));
    }
    previous = std::move(profile);
  }
  const auto& r = out.residual_history;
  out.residual = r.back();
  out.extraction_time = sign * out.cadence_times.back();
  const bool decaying = r.size() >= 3 && r[r.size() - 1] < r[r.size() - 2] && r[r.size() - 2] < r[r.size() - 3];
  out.converged = out.residual <= 1e-10 || decaying;
  std::ostringstream msg;
  msg.precision(6);
  if (out.converged) {
    msg << "converged: residual " << out.residual << " at |T| = " << out.cadence_times.back();
  } else {
    msg << "no scattering detected: residuals";
    for (double x : r) msg << ' ' << x;
    msg << " do not decrease over the last three cadences";
  }
  out.report = msg.str();
  return out;
}

std::vector<WaveField> evolve_backward(const WaveField& u0, const StepPlan& plan, std::span<const double> times) {
  require_physical(u0, "evolve_backward");
  WaveField v = u0;
  for (auto& z : v.values) z = std::conj(z);
  v.time = -u0.time;
  const double t_end = times.empty() ? v.time : times.back();
  std::vector<WaveField> out;
  evolve(std::move(v), plan, t_end, times, [&](const WaveField& f) {
    if (std::find(times.begin(), times.end(), f.time) == times.end()) return;
    WaveField w = f;
    for (auto& z : w.values) z = std::conj(z);
    w.time = -f.time;
    out.push_back(std::move(w));
  });
  return out;
}

double free_time_limit(const WaveField& profile, double tol, double t_cap) {
  double best = 0.0;
  for (double t = 1.0; t <= t_cap; t *= 2.0) {
    if (edge_density(free_evolve(profile, t)) >= tol || edge_density(free_evolve(profile, -t)) >= tol) break;
    best = t;
  }
  if (best == 0.0) throw ScatteringError("input", "free evolution reaches the box edge before t = 1");
  return best;
}

double picard_ratio(const WaveField& phi, double sigma, double t_max) {
  const double m = std::sqrt(mass(phi));
  if (!(m > 0.0)) return 0.0;
  const int n = 400;
  const double lmax = std::log1p(t_max);
  auto integrand = [&](double s) {
    const auto u = free_evolve(phi, s);
    return std::sqrt(phi.grid.cell_volume() * kernels::sum_abs_pow(u.values, 4.0 * sigma + 2.0));
  };
  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    double s_prev = 0.0, f_prev = integrand(0.0);
    for (int i = 1; i <= n; ++i) {
      const double s = std::expm1(lmax * i / n);
      const double f = integrand(sign * s);
      total += 0.5 * (s - s_prev) * (f + f_prev);
      s_prev = s;
      f_prev = f;
    }
  }
  return total / m;
}

double small_data_amplitude(const WaveField& phi, double sigma, double t_max, double target) {
  const double r = picard_ratio(phi, sigma, t_max);
  if (!(r > 0.0)) return 1.0;
  return std::min(1.0, std::pow(target / r, 1.0 / (2.0 * sigma)));
}

ScatteringResult scattering_map(const WaveField& u_minus, double sigma, const ScatteringOptions& options) {
  require_physical(u_minus, "scattering_map");
  const int dim = u_minus.grid.dim;
  if (!(sigma > strauss_exponent(dim))) throw ScatteringError("wave-operator", "sigma <= sigma_0(d)");
  ScatteringResult res;
  WaveField datum = u_minus;
  datum.sigma = sigma;
  datum.model = Model::Direct;
  datum.time = 0.0;
  const double norm = std::sqrt(mass(datum));
  if (norm == 0.0) {
    res.u0 = datum;
    res.plus.state = datum;
    res.plus.converged = true;
    res.plus.report = "zero datum";
    return res;
  }
  const double T = options.t_max > 0.0 ? options.t_max : free_time_limit(datum);
  if (T < 4.0 * options.t0) throw ScatteringError("wave-operator", "time window too short for dyadic cadences");
  res.t_max = T;
  // Dyadic increments of the profile scale like T^{1 - d sigma}.
  const double rho = std::pow(2.0, 1.0 - dim * sigma);

  WaveField q = datum;  // profile imposed at -T
  for (int k = 0; k < options.max_refinements; ++k) {
    const auto half = evolve(free_evolve(q, -T), options.plan, -T / 2.0).field;
    const WaveField p_half = free_conjugate(half);
    // Target at -T/2: u_minus plus the tail from -infinity, Delta/(1 - rho).
    WaveField defect = difference(p_half, datum);
    axpy(defect, -1.0 / (1.0 - rho), difference(p_half, q));
    for (std::size_t i = 0; i < q.values.size(); ++i) q.values[i] -= defect.values[i];
    q.time = 0.0;
    res.refinement_defects.push_back(std::sqrt(mass(defect)) / norm);
    if (res.refinement_defects.back() <= options.refinement_tol) break;
  }
  const auto& d = res.refinement_defects;
  if (d.size() >= 2 && !(d.back() < d.front()))
    throw ScatteringError("wave-operator", "backward refinement does not contract");
  res.backward_residual = d.back();

  std::vector<double> cadences;
  for (double t = options.t0; t <= T * (1.0 + 1e-12); t *= 2.0) cadences.push_back(t);
  std::vector<double> marks{0.0};
  marks.insert(marks.end(), cadences.begin(), cadences.end());
  std::vector<WaveField> forward;
  evolve(free_evolve(q, -T), options.plan, T, marks, [&](const WaveField& f) {
    if (f.time == 0.0) res.u0 = f;
    if (f.time > 0.0 && std::find(cadences.begin(), cadences.end(), f.time) != cadences.end()) forward.push_back(f);
  });
  res.plus = extract_asymptotic(forward, Direction::Plus, false, rho);
  if (!res.plus.converged) throw ScatteringError("extraction", res.plus.report);
  return res;
}

double interaction_sigma_norm(const WaveField& w) {
  if (w.model != Model::DirectLens) return sigma_norm(free_conjugate(w));
  // w = L_t^{-1} u in the <t> frame; L_t and e^{-it Lap/2} are unitary, grad
  // commutes with the free group and x e^{-it Lap/2} = e^{-it Lap/2} (x + it grad).
  const double tau = w.tau, rate = w.tau_dot;
  const Grid& g = w.grid;
  double grad2 = 0.0, j2 = 0.0;
  std::vector<std::vector<cplx>> d;
  for (int a = 0; a < g.dim; ++a) d.push_back(spectral_derivative(w, a));
  const auto nx = static_cast<std::size_t>(g.points_per_axis);
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    std::size_t rest = i;
    for (int a = g.dim - 1; a >= 0; --a) {
      const double y = g.coords[rest % nx];
      rest /= nx;
      const cplx dv = d[static_cast<std::size_t>(a)][i];
      grad2 += std::norm(dv / tau + cplx(0.0, rate * y) * w.values[i]);
      j2 += std::norm(y * w.values[i] / tau + cplx(0.0, rate) * dv);
    }
  }
  return std::sqrt(mass(w) + g.cell_volume() * (grad2 + j2));
}

ContinuityReport interaction_picture_continuity(const WaveField& phi, double sigma, std::span<const double> nu_list,
                                                const StepPlan& plan, std::span<const double> times) {
  if (phi.model != Model::Direct && phi.model != Model::DirectLens)
    throw ScatteringError("input", "continuity runs take Direct or DirectLens data");
  if (times.empty()) throw ScatteringError("input", "empty time grid");
  const bool lens = phi.model == Model::DirectLens;
  ContinuityReport rep;
  rep.sigma = sigma;
  rep.times.assign(times.begin(), times.end());

  // Physical runs store interaction-picture profiles; lens runs store v, whose
  // differences have the same L2 norm as the profile differences.
  auto profiles = [&](double s) {
    WaveField u = phi;
    u.sigma = s;
    u.time = 0.0;
    std::vector<WaveField> out;
    evolve(u, plan, times.back(), times, [&](const WaveField& f) {
      if (std::find(times.begin(), times.end(), f.time) != times.end()) out.push_back(lens ? f : free_conjugate(f));
    });
    return out;
  };
  const auto base = profiles(sigma);
  const double half_time = times.back() / 2.0;

  std::vector<double> offsets, sups;
  for (double nu : nu_list) {
    ContinuityRow row;
    row.nu = nu;
    const auto other = nu == sigma ? base : profiles(nu);
    for (std::size_t j = 0; j < base.size(); ++j) {
      const auto diff = difference(other[j], base[j]);
      const double l2 = std::sqrt(mass(diff));
      row.l2_by_time.push_back(l2);
      if (l2 > row.sup_l2) {
        row.sup_l2 = l2;
        row.argmax_t = base[j].time;
      }
      row.sup_sigma = std::max(row.sup_sigma, lens ? interaction_sigma_norm(diff) : sigma_norm(diff));
      if (base[j].time <= half_time) row.sup_l2_half = std::max(row.sup_l2_half, l2);
    }
    if (row.sup_l2 > 0.0) {
      offsets.push_back(std::abs(nu - sigma));
      sups.push_back(row.sup_l2);
      rep.max_saturation_change = std::max(rep.max_saturation_change, (row.sup_l2 - row.sup_l2_half) / row.sup_l2);
    }
    rep.rows.push_back(std::move(row));
  }
  if (offsets.size() >= 2) {
    const auto fit = power_fit(offsets, sups);
    rep.theta_hat = fit.exponent;
    rep.theta_r2 = fit.r2;
  }
  return rep;
}

}  // namespace nlsflow
