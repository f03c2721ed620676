#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlsflow/error.hpp"
#include "nlsflow/scattering.hpp"

using namespace nlsflow;

namespace {

WaveField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  WaveField f(g, 1.5, Model::Direct);
  for (auto& z : f.values) z = {n(rng), n(rng)};
  return f;
}

std::vector<double> dyadic(double t0, double t1) {
  std::vector<double> out;
  for (double t = t0; t <= t1; t *= 2.0) out.push_back(t);
  return out;
}

std::vector<WaveField> trajectory(const WaveField& u0, const StepPlan& plan, const std::vector<double>& times) {
  std::vector<WaveField> out;
  evolve(u0, plan, times.back(), times, [&](const WaveField& f) {
    if (f.time > 0.0) out.push_back(f);
  });
  return out;
}

}  // namespace

TEST_CASE("Strauss exponent") {
  CHECK(strauss_exponent(1) == doctest::Approx((1.0 + std::sqrt(17.0)) / 4.0).epsilon(1e-15));
  CHECK(strauss_exponent(2) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(strauss_exponent(3) == doctest::Approx(0.5).epsilon(1e-15));
  for (int d = 1; d <= 10; ++d) {
    CHECK(strauss_exponent(d) > 1.0 / d);
    CHECK(strauss_exponent(d) < 2.0 / d);
  }
  CHECK_THROWS_AS(strauss_exponent(0), ScatteringError);
}

TEST_CASE("free conjugation is unitary and inverts the free flow") {
  const Grid g = make_grid(1, 256, 10.0);
  auto u = random_field(g, 4);
  CHECK(l2_distance(free_conjugate(u), u) <= 1e-13);  // t = 0
  u.time = 3.7;
  CHECK(std::abs(mass(free_conjugate(u)) - mass(u)) <= 1e-12 * mass(u));

  // Composition with the solver's linear flow, one step and many steps.
  const auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  StepPlan p;
  p.nonlinear = false;
  p.dt = 2.5;
  CHECK(l2_distance(free_conjugate(step(phi, p)), phi) <= 1e-12);
  p.dt = 0.01;
  const auto many = evolve(phi, p, 2.0).field;
  CHECK(l2_distance(free_conjugate(many), phi) <= 1e-12);
  CHECK(l2_distance(free_evolve(phi, 2.0), many) <= 1e-12);

  const Grid g2 = make_grid(2, 32, 6.0);
  auto v = random_field(g2, 5);
  v.time = -1.3;
  CHECK(std::abs(mass(free_conjugate(v)) - mass(v)) <= 1e-12 * mass(v));
}

TEST_CASE("Sigma norm of a Gaussian") {
  const double a = 0.8;
  const auto phi = gaussian_state(make_grid(1, 512, 12.0), a);
  CHECK(sigma_norm(phi) == doctest::Approx(std::sqrt(1.0 + 1.0 / (2 * a * a) + a * a / 2.0)).epsilon(1e-10));
}

TEST_CASE("extraction: free flow converges immediately") {
  const auto phi = gaussian_state(make_grid(1, 1024, 60.0), 1.0, {}, {}, 1.5, Model::Direct);
  StepPlan p;
  p.nonlinear = false;
  p.dt = 0.01;
  const auto traj = trajectory(phi, p, dyadic(1.0, 8.0));
  const auto st = extract_asymptotic(traj, Direction::Plus);
  CHECK(st.converged);
  CHECK(st.residual <= 1e-10);
  CHECK(l2_distance(st.state, phi) <= 1e-10);
}

TEST_CASE("extraction: short range converges, long range stalls") {
  const Grid g = make_grid(1, 2048, 200.0);
  StepPlan p;
  p.dt = 2e-3;
  const auto times = dyadic(1.0, 32.0);
  auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const double amp = small_data_amplitude(phi, 1.5, 32.0);
  for (auto& z : phi.values) z *= amp;

  const auto st = extract_asymptotic(trajectory(phi, p, times), Direction::Plus);
  CHECK(st.converged);
  REQUIRE(st.residual_history.size() == 5);
  for (std::size_t i = 1; i < st.residual_history.size(); ++i)
    CHECK(st.residual_history[i] < st.residual_history[i - 1]);

  // sigma = 0.8 <= 1/d: the phase correction keeps growing like T^{1 - sigma}.
  auto lr = phi;
  lr.sigma = 0.8;
  const auto traj = trajectory(lr, p, times);
  CHECK_THROWS_AS(extract_asymptotic(traj, Direction::Plus), ScatteringError);
  const auto neg = extract_asymptotic(traj, Direction::Plus, true);
  CHECK_FALSE(neg.converged);
  CHECK(neg.report.find("no scattering detected") != std::string::npos);
}

TEST_CASE("backward evolution by conjugation") {
  const Grid g = make_grid(1, 512, 30.0);
  StepPlan p;
  p.dt = 2e-3;
  const std::vector<double> times{1.0, 2.0};
  // Real datum: u(-t) is the conjugate of u(t).
  const auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const auto back = evolve_backward(phi, p, times);
  const auto fwd = trajectory(phi, p, times);
  REQUIRE(back.size() == 2);
  CHECK(back[1].time == -2.0);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back[j].values[i] - std::conj(fwd[j].values[i])) <= 1e-13);

  // Moving datum: going forward from u(-2) returns to phi.
  const std::vector<double> slope{0.7};
  const auto mov = gaussian_state(g, 1.0, {}, slope, 1.5, Model::Direct);
  const auto b = evolve_backward(mov, p, std::vector<double>{2.0});
  CHECK(l2_distance(evolve(b[0], p, 0.0).field, mov) <= 1e-10);
}

TEST_CASE("free time limit and small-data scaling") {
  const Grid g = make_grid(1, 1024, 50.0);
  const auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const double T = free_time_limit(phi);
  CHECK(edge_density(free_evolve(phi, T)) < 1e-12);
  CHECK(edge_density(free_evolve(phi, 2 * T)) >= 1e-12);

  const double r1 = picard_ratio(phi, 1.5, 8.0);
  auto half = phi;
  for (auto& z : half.values) z *= 0.5;
  CHECK(picard_ratio(half, 1.5, 8.0) == doctest::Approx(r1 * std::pow(0.5, 3.0)).epsilon(1e-12));
  const double a = small_data_amplitude(phi, 1.5, 8.0);
  auto scaled = phi;
  for (auto& z : scaled.values) z *= a;
  CHECK(picard_ratio(scaled, 1.5, 8.0) == doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("scattering map: trivial cases") {
  const Grid g = make_grid(1, 1024, 100.0);
  ScatteringOptions opt;
  opt.plan.dt = 2e-3;
  const auto zero = scattering_map(zero_field(g, 1.5, Model::Direct), 1.5, opt);
  CHECK(mass(zero.plus.state) == 0.0);

  opt.plan.nonlinear = false;
  const auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const auto lin = scattering_map(phi, 1.5, opt);
  CHECK(l2_distance(lin.plus.state, phi) <= 1e-8);
  CHECK(l2_distance(lin.u0, phi) <= 1e-8);

  CHECK_THROWS_AS(scattering_map(phi, 1.0, opt), ScatteringError);
}

TEST_CASE("scattering map: conservation between asymptotic states") {
  // ||u_+|| = ||u_-|| (mass) and ||grad u_+|| = ||grad u_-|| (energy: the
  // potential part vanishes as t -> infinity).
  const Grid g = make_grid(1, 1024, 100.0);
  ScatteringOptions opt;
  opt.plan.dt = 2e-3;
  auto um = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const double amp = small_data_amplitude(um, 1.5, 16.0);
  for (auto& z : um.values) z *= amp;
  const auto res = scattering_map(um, 1.5, opt);
  CHECK(res.plus.converged);
  CHECK(res.t_max == 16.0);
  for (std::size_t i = 1; i < res.refinement_defects.size(); ++i)
    CHECK(res.refinement_defects[i] < res.refinement_defects[i - 1]);
  CHECK(std::abs(mass(res.plus.state) / mass(um) - 1.0) <= 1e-3);
  CHECK(std::abs(gradient_norm(res.plus.state) / gradient_norm(um) - 1.0) <= 1e-2);
  CHECK(l2_distance(res.plus.state, um) > 1e-4);  // the map is not the identity
}

TEST_CASE("interaction-picture continuity: physical and lens forms agree") {
  const Grid g = make_grid(1, 1024, 100.0);
  StepPlan p;
  p.dt = 2e-3;
  auto phi = gaussian_state(g, 1.0, {}, {}, 1.5, Model::Direct);
  const double amp = small_data_amplitude(phi, 1.5, 16.0);
  for (auto& z : phi.values) z *= amp;
  const std::vector<double> nus{1.5, 1.49, 1.48, 1.46};
  const auto times = dyadic(1.0, 8.0);
  const auto phys = interaction_picture_continuity(phi, 1.5, nus, p, times);

  auto v = gaussian_state(make_grid(1, 256, 12.0), 1.0, {}, {}, 1.5, Model::DirectLens);
  for (auto& z : v.values) z *= amp;
  const auto lens = interaction_picture_continuity(v, 1.5, nus, p, times);
  CHECK(phys.rows[0].sup_l2 == 0.0);
  for (std::size_t i = 1; i < nus.size(); ++i) {
    CHECK(lens.rows[i].sup_l2 == doctest::Approx(phys.rows[i].sup_l2).epsilon(1e-5));
    CHECK(lens.rows[i].sup_sigma == doctest::Approx(phys.rows[i].sup_sigma).epsilon(1e-4));
  }
  CHECK(lens.theta_hat == doctest::Approx(phys.theta_hat).epsilon(1e-4));
}

TEST_CASE("interaction-picture continuity saturates at long times") {
  auto v = gaussian_state(make_grid(1, 256, 12.0), 1.0, {}, {}, 1.5, Model::DirectLens);
  const double amp = small_data_amplitude(gaussian_state(make_grid(1, 1024, 100.0), 1.0), 1.5, 16.0);
  for (auto& z : v.values) z *= amp;
  StepPlan p;
  p.dt = 1e-3;
  p.dt_growth = 1e-3;
  p.dt_max = 1.0;
  const std::vector<double> nus{1.5, 1.49, 1.48, 1.46};
  const auto rep = interaction_picture_continuity(v, 1.5, nus, p, dyadic(1.0, 1024.0));
  CHECK(rep.rows[0].sup_l2 == 0.0);
  CHECK(rep.theta_hat >= 0.9);
  CHECK(rep.theta_hat <= 1.1);
  CHECK(rep.max_saturation_change < 0.05);
  for (std::size_t i = 2; i < rep.rows.size(); ++i) CHECK(rep.rows[i].sup_l2 > rep.rows[i - 1].sup_l2);
}
