#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlsflow/grid.hpp"
#include "nlsflow/kernels.hpp"

using namespace nlsflow;
namespace k = nlsflow::kernels;

namespace {

std::vector<cplx> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  v[7] = 0.0;
  return v;
}

bool bitwise_equal(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) return false;
  return true;
}

}  // namespace

TEST_CASE("pointwise kernels agree bitwise between serial and OpenMP") {
  for (int dim : {1, 2}) {
    const Grid g = make_grid(dim, dim == 1 ? 1 << 15 : 256, 9.0);
    const auto base = random_values(g.size(), 11u + static_cast<unsigned>(dim));

    auto a = base, b = base;
    k::serial::apply_kinetic_phase(g, a, 0.37);
    k::parallel::apply_kinetic_phase(g, b, 0.37);
    CHECK(bitwise_equal(a, b));

    for (auto kind : {k::Nonlinearity::Power, k::Nonlinearity::PowerMinusOne, k::Nonlinearity::Log}) {
      k::PotentialPhase p{0.01, 0.02, kind, 0.3, 1e-12};
      a = base;
      b = base;
      k::serial::apply_potential_phase(g, a, p);
      k::parallel::apply_potential_phase(g, b, p);
      CHECK(bitwise_equal(a, b));
      CHECK(a[7] == cplx{});
    }

    a = base;
    b = base;
    k::serial::dealias(g, a);
    k::parallel::dealias(g, b);
    CHECK(bitwise_equal(a, b));
  }
}

TEST_CASE("potential phase has unit modulus") {
  const Grid g = make_grid(1, 4096, 5.0);
  const auto base = random_values(g.size(), 3);
  auto v = base;
  k::apply_potential_phase(g, v, {0.2, 0.7, k::Nonlinearity::PowerMinusOne, 0.05, 1e-12});
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(std::abs(v[i]) - std::abs(base[i])) <= 1e-14 * (1.0 + std::abs(base[i])));
}

TEST_CASE("reductions are independent of the thread count and close to the serial sum") {
  const Grid g = make_grid(1, 1 << 16, 9.0);
  const auto v = random_values(g.size(), 5);
  const int saved = k::thread_limit();

  k::set_thread_limit(1);
  const double one = k::parallel::sum_abs2(v);
  const double one_r = k::parallel::sum_radius2_abs2(g, v);
  k::set_thread_limit(4);
  CHECK(k::parallel::sum_abs2(v) == one);
  CHECK(k::parallel::sum_radius2_abs2(g, v) == one_r);
  k::set_thread_limit(saved);

  CHECK(one == doctest::Approx(k::serial::sum_abs2(v)).epsilon(1e-13));
  CHECK(one_r == doctest::Approx(k::serial::sum_radius2_abs2(g, v)).epsilon(1e-13));
  CHECK(k::parallel::sum_k2_abs2(g, v) == doctest::Approx(k::serial::sum_k2_abs2(g, v)).epsilon(1e-13));
  CHECK(k::parallel::sum_abs_pow(v, 2.6) == doctest::Approx(k::serial::sum_abs_pow(v, 2.6)).epsilon(1e-13));
}

TEST_CASE("dealias keeps exactly the modes |m| <= N/3") {
  const Grid g = make_grid(1, 64, 1.0);
  std::vector<cplx> s(g.size(), cplx{1.0, 0.0});
  k::dealias(g, s);
  for (int j = 0; j < 64; ++j) {
    const int m = j < 32 ? j : j - 64;
    CHECK((s[static_cast<std::size_t>(j)] != cplx{}) == (std::abs(m) <= 21));
  }
}
