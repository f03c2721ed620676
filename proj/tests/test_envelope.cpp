#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlsflow/envelope.hpp"
#include "nlsflow/error.hpp"

using namespace nlsflow;

namespace {

std::vector<double> linear_grid(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = t_max * i / n;
  return t;
}

std::vector<double> log_grid(double t_max) {
  std::vector<double> t{0.0};
  for (double x = 1e-2; x < t_max; x *= 1.5) t.push_back(x);
  t.push_back(t_max);
  return t;
}

}  // namespace

TEST_CASE("initial data") {
  const std::vector<double> t0{0.0};
  const auto s = integrate_tau(0.3, 1, t0).front();
  CHECK(s.tau == 1.0);
  CHECK(s.tau_dot == 0.0);
  const auto r = integrate_r(0.7, t0).front();
  CHECK(r.r == 1.0);
  CHECK(r.r_dot == 0.0);
}

TEST_CASE("r_2 is the Japanese bracket") {
  const auto grid = linear_grid(10.0, 40);
  for (const auto& s : integrate_r(2.0, grid)) CHECK(std::abs(s.r - std::sqrt(1.0 + s.t * s.t)) <= 1e-10);
  const std::vector<double> one{0.0, 1.0};
  CHECK(std::abs(integrate_r(2.0, one).back().r - std::sqrt(2.0)) <= 1e-10);
  // tau at sigma = 2/d is r_2(t / sqrt(2)).
  for (const auto& s : integrate_tau(2.0, 1, grid)) {
    const double x = s.t / std::sqrt(2.0);
    CHECK(std::abs(s.tau - std::sqrt(1.0 + x * x)) <= 1e-10);
  }
}

TEST_CASE("first integral along trajectories to t = 1e3") {
  const auto grid = log_grid(1e3);
  for (double sigma : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0}) {
    for (int d : {1, 2}) {
      double worst = 0.0;
      for (const auto& s : integrate_tau(sigma, d, grid)) worst = std::max(worst, std::abs(first_integral_residual(s)));
      CHECK(worst <= 1e-10);
    }
  }
  for (double alpha : {0.5, 1.0, 2.0}) {
    double worst = 0.0;
    for (const auto& s : integrate_r(alpha, grid)) worst = std::max(worst, std::abs(first_integral_residual(s)));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("monotone envelope with bounded speed") {
  const auto grid = log_grid(1e4);
  for (double sigma : {0.05, 0.5, 1.5}) {
    const auto traj = integrate_tau(sigma, 1, grid);
    for (std::size_t i = 1; i < traj.size(); ++i) {
      CHECK(traj[i].tau >= traj[i - 1].tau);
      CHECK(traj[i].tau >= 1.0);
      CHECK(traj[i].tau_dot >= 0.0);
      CHECK(traj[i].tau_dot < 1.0 / std::sqrt(sigma));
    }
  }
}

TEST_CASE("large-time asymptotics") {
  const std::vector<double> grid{0.0, 1e6};
  const auto t0 = integrate_tau(0.0, 1, grid).back();
  const double ratio = t0.tau / (1e6 * std::sqrt(std::log(1e6)));
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto s = integrate_tau(sigma, 1, grid).back();
    CHECK(std::sqrt(sigma) * s.tau / 1e6 == doctest::Approx(1.0).epsilon(1e-2));
  }
  for (double alpha : {0.5, 1.0, 2.0}) CHECK(integrate_r(alpha, grid).back().r / 1e6 == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("r_2 correction term at t = 100") {
  const std::vector<double> grid{0.0, 100.0};
  const double w = integrate_r(2.0, grid).back().r - 100.0;
  const double predicted = std::pow(100.0, 1.0 - 2.0) / (2.0 * (2.0 - 1.0));
  CHECK(std::abs(w - predicted) <= 0.1 * predicted);
}

TEST_CASE("tau_from_r agrees with direct integration") {
  for (int d : {1, 2}) {
    for (double sigma : {0.05, 0.1, 0.5, 2.0 / d}) {
      const double alpha = d * sigma;
      const auto t_grid = linear_grid(50.0, 25);
      std::vector<double> r_grid;
      for (double t : t_grid) r_grid.push_back(t / std::sqrt(alpha));
      const auto tau = integrate_tau(sigma, d, t_grid);
      const auto r = integrate_r(alpha, r_grid);
      double worst = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const auto mapped = tau_from_r(r[i], sigma, d);
        CHECK(mapped.t == doctest::Approx(t_grid[i]).epsilon(1e-14));
        worst = std::max({worst, std::abs(mapped.tau - tau[i].tau), std::abs(mapped.tau_dot - tau[i].tau_dot)});
      }
      CHECK(worst <= 1e-9);
    }
  }
  CHECK_THROWS_AS(integrate_r(0.0, std::vector<double>{0.0, 1.0}), EnvelopeError);
  CHECK_THROWS_AS(tau_from_r(RState{0.0, 1.0, 0.0, 0.3}, 0.2, 1), EnvelopeError);
}

TEST_CASE("compactified time") {
  CHECK(time_change_s_limit(0.1, 1) == doctest::Approx(std::log(10.0) / 3.6).epsilon(1e-15));
  // s increases towards its limit along the trajectory; tau^{-d sigma} decays too slowly to
  // reach it by integration, so the tail is probed on the first-integral curve directly.
  const auto traj = integrate_tau(0.1, 1, std::vector<double>{0.0, 1.0, 1e2, 1e4, 1e6});
  for (std::size_t i = 2; i < traj.size(); ++i) CHECK(time_change_s(traj[i]) > time_change_s(traj[i - 1]));
  CHECK(time_change_s(traj.back()) < time_change_s_limit(0.1, 1));
  const double huge = 1e200;
  const EnvelopeState far{1e200, huge, std::sqrt(10.0 * (1.0 - std::pow(huge, -0.1))), 0.1, 1};
  CHECK(time_change_s(far) == doctest::Approx(time_change_s_limit(0.1, 1)).epsilon(1e-15));
  CHECK_THROWS_AS(time_change_s(EnvelopeState{0.0, 1.0, 0.0, 0.1, 1}), EnvelopeError);

  // Chain rule ds/dt * 4 (1 - d sigma) tau' tau^{d sigma + 1} = 1, five-point centred differences.
  for (double sigma : {0.1, 0.3}) {
    for (double t : {0.5, 2.0, 10.0}) {
      const double h = 1e-3;
      const auto tr = integrate_tau(sigma, 1, std::vector<double>{0.0, t - 2 * h, t - h, t, t + h, t + 2 * h});
      const double dsdt = (time_change_s(tr[1]) - 8.0 * time_change_s(tr[2]) + 8.0 * time_change_s(tr[4]) -
                           time_change_s(tr[5])) / (12.0 * h);
      const auto& s = tr[3];
      const double lhs = dsdt * 4.0 * (1.0 - sigma) * s.tau_dot * std::pow(s.tau, sigma + 1.0);
      CHECK(std::abs(lhs - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("regular limit sigma -> 0 on a compact interval") {
  const auto grid = linear_grid(10.0, 100);
  const auto ref = integrate_tau(0.0, 1, grid);
  double first = 0.0;
  double previous = 1e300;
  for (double sigma : {0.08, 0.04, 0.02, 0.01, 0.005}) {
    const auto tr = integrate_tau(sigma, 1, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) gap = std::max(gap, std::abs(tr[i].tau - ref[i].tau));
    CHECK(gap < previous);
    if (first == 0.0) first = gap;
    previous = gap;
  }
  // Sixteen-fold smaller sigma, roughly sixteen-fold smaller gap.
  CHECK(previous < first / 10.0);
}

TEST_CASE("singular limit alpha -> 0 for r_alpha") {
  for (double alpha : {1.0, 0.5, 0.25}) {
    const double horizon = std::exp(2.0 / alpha);
    const auto grid = log_grid(horizon);
    const auto a = integrate_r(alpha, grid);
    const auto b = integrate_r(alpha / 2.0, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i].r - b[i].r));
    CHECK(gap >= 1.0);
  }
}

TEST_CASE("tau difference bound") {
  const auto rep = tau_difference_bound(0.01, 1e4);
  CHECK(std::isfinite(rep.sup_ratio));
  CHECK(rep.sup_ratio > 0.0);
  CHECK(rep.stable);

  // Transition regime sigma ~ 1 / ln t: tau_sigma, tau_0 and the bound are comparable.
  const double t = 1e4;
  const double sigma = 1.0 / std::log(t);
  const auto a = integrate_tau(sigma, 1, std::vector<double>{0.0, t}).back();
  const auto b = integrate_tau(0.0, 1, std::vector<double>{0.0, t}).back();
  const double bound = sigma * t * std::pow(std::log(t + 2.0), 1.5);
  for (double r : {a.tau / b.tau, a.tau / bound, b.tau / bound}) {
    CHECK(r >= 0.1);
    CHECK(r <= 10.0);
  }

  double previous = 1e300;
  for (double s : {0.08, 0.04, 0.02, 0.01}) {
    const auto r = tau_difference_bound(s, 1e3);
    CHECK(r.sup_abs_difference < previous);
    previous = r.sup_abs_difference;
  }
}

TEST_CASE("advance_envelope follows the integrated trajectory") {
  const auto ref = integrate_tau(0.1, 1, std::vector<double>{0.0, 3.0}).back();
  EnvelopeState s{0.0, 1.0, 0.0, 0.1, 1};
  for (int i = 0; i < 300; ++i) s = advance_envelope(s, 0.01);
  CHECK(s.tau == doctest::Approx(ref.tau).epsilon(1e-11));
  const auto back = advance_envelope(s, -3.0);
  CHECK(std::abs(back.tau - 1.0) <= 1e-10);
  CHECK(std::abs(back.tau_dot) <= 1e-10);
}
