#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "logfe/closedforms.hpp"
#include "logfe/density.hpp"

using namespace logfe;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const RadialGrid> default_grid() {
  static auto g = std::make_shared<RadialGrid>(make_radial_grid(2048, 100.0, Grading::geometric));
  return g;
}

std::vector<double> gauss_values(const RadialGrid& g, double M) {
  std::vector<double> v(g.N);
  for (int i = 0; i < g.N; ++i) v[i] = M / (2.0 * kPi) * std::exp(-0.5 * g.nodes[i] * g.nodes[i]);
  return v;
}

std::vector<double> rho_star_values(const RadialGrid& g) {
  std::vector<double> v(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double d = 1.0 + g.nodes[i] * g.nodes[i];
    v[i] = 1.0 / (kPi * d * d);
  }
  return v;
}

PowerLogSeries rho_star_tail() {
  return inv_square_power_series(1.0, -2.0, 5) * PowerLogSeries::monomial(1.0 / kPi, -4.0);
}

}  // namespace

TEST_SUITE("density") {

TEST_CASE("renormalization pins the quadrature mass") {
  auto g = default_grid();
  auto rho = make_radial_density(g, gauss_values(*g, 1.37), 2.0, {}, {}, {}, 0, {}, true);
  CHECK(quadrature_mass(rho) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rho.mass == 2.0);
}

TEST_CASE("mass mismatch beyond tolerance is rejected") {
  auto g = default_grid();
  CHECK_THROWS(make_radial_density(g, gauss_values(*g, 1.0), 1.3));
  CHECK_NOTHROW(make_radial_density(g, gauss_values(*g, 1.0), 1.0));
}

TEST_CASE("value validation") {
  auto g = default_grid();
  auto v = gauss_values(*g, 1.0);
  v[5] = -1e-3;
  CHECK_THROWS(make_radial_density(g, v, 1.0));
  v.pop_back();
  CHECK_THROWS(make_radial_density(g, v, 1.0));
  CHECK_THROWS(make_radial_density(g, gauss_values(*g, 1.0), -1.0));
}

TEST_CASE("attachment validation") {
  auto g = default_grid();
  auto vals = rho_star_values(*g);
  // mass tail must decay faster than r^-2
  CHECK_THROWS(make_radial_density(g, vals, 1.0, PowerLogSeries::monomial(1.0, -2.0)));
  // origin singularity must be integrable and needs a geometric grid
  CHECK_THROWS(make_radial_density(g, vals, 1.0, rho_star_tail(),
                                   PowerLogSeries::monomial(1.0, -2.5), {}, 40));
  auto gu = std::make_shared<RadialGrid>(make_radial_grid(256, 50.0, Grading::uniform));
  CHECK_THROWS(make_radial_density(gu, gauss_values(*gu, 1.0), 1.0, {},
                                   PowerLogSeries::monomial(1.0, -0.5), {}, 40));
}

TEST_CASE("tail correction recovers the full mass") {
  auto g = default_grid();
  auto rho = make_radial_density(g, rho_star_values(*g), 1.0, rho_star_tail());
  CHECK(quadrature_mass(rho) == doctest::Approx(1.0).epsilon(1e-6));
  // with the analytic tail the defect is far below the contract tolerance
  CHECK(std::abs(quadrature_mass(rho) - 1.0) < 1e-9);
}

TEST_CASE("integrate_radial handles zero, tails, and log-weighted tails") {
  auto g = default_grid();
  std::vector<double> zero(g->N, 0.0);
  CHECK(integrate_radial(*g, zero) == 0.0);

  CHECK(integrate_radial(*g, rho_star_values(*g), rho_star_tail()) ==
        doctest::Approx(1.0).epsilon(1e-6));

  // rho_star * log(1+r^2) integrates to exactly 1; its tail needs log terms
  std::vector<double> f(g->N);
  for (int i = 0; i < g->N; ++i) {
    const double r = g->nodes[i];
    f[i] = std::log1p(r * r) / (kPi * std::pow(1.0 + r * r, 2.0));
  }
  PowerLogSeries logfac = PowerLogSeries::monomial(2.0, 0.0, 1) + log1p_power_series(1.0, -2.0, 5);
  const double pm = integrate_radial(*g, f, rho_star_tail() * logfac);
  CHECK(pm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(pm - 1.0) < 1e-8);
}

TEST_CASE("wave function normalization and square round trip") {
  auto g = default_grid();
  std::vector<double> v(g->N);
  for (int i = 0; i < g->N; ++i) v[i] = std::exp(-0.25 * g->nodes[i] * g->nodes[i]);
  auto u = make_wave_function(g, v, 3.0);
  CHECK(u.mass == 3.0);

  auto rho = density_of(u);
  CHECK(rho.mass == 3.0);
  CHECK(quadrature_mass(rho) == doctest::Approx(3.0).epsilon(1e-10));

  auto u2 = sqrt_of(rho);
  for (int i : {0, 100, 1000}) CHECK(u2.values[i] == doctest::Approx(u.values[i]).epsilon(1e-10));

  std::vector<double> dead(g->N, 0.0);
  CHECK_THROWS(make_wave_function(g, dead, 1.0));
}

TEST_CASE("planar sampling renormalizes the mass exactly") {
  auto grid = make_planar_grid(0.05, 20.0);
  auto profile = [](double r) {
    const double d = 1.0 + r * r;
    return 1.0 / (kPi * d * d);
  };
  auto rho = sample_planar(profile, 1.0, std::sqrt(199.0), 0.0, 0.0, grid);
  double sum = 0.0;
  for (double v : rho.values) sum += v;
  CHECK(sum * grid.h * grid.h == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rho.mass == 1.0);
}

TEST_CASE("planar sampling honors the support precondition") {
  auto grid = make_planar_grid(0.05, 20.0);
  auto bump = [](double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    return std::exp(-1.0 / ((r - 1.0) * (2.0 - r)));
  };
  auto shifted = sample_planar(bump, 1.0, 2.0, 5.0, 0.0, grid);
  double sum = 0.0;
  for (double v : shifted.values) sum += v;
  CHECK(sum * grid.h * grid.h == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS(sample_planar(bump, 1.0, 2.0, 25.0, 0.0, grid));
}

TEST_CASE("planar sampling from a discretized radial density") {
  auto rho = discretize(ClosedFormFamily{FamilyKind::rho_star, 2.0, 0.0, 1.0, 1.0}, default_grid());
  auto grid = make_planar_grid(0.1, 20.0);
  auto planar = sample_planar(rho, 0.0, 0.0, grid);
  CHECK(planar.mass == 1.0);
  // center cell sits at (h/2, h/2)
  const int c = grid.n / 2;
  const double r0 = std::hypot(grid.centers[c], grid.centers[c]);
  const double expect = 1.0 / (kPi * std::pow(1.0 + r0 * r0, 2.0));
  CHECK(planar.values[std::size_t(c) * grid.n + c] == doctest::Approx(expect).epsilon(0.02));
}

}  // TEST_SUITE
