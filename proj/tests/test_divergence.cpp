#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "logfe/closedforms.hpp"
#include "logfe/divergence.hpp"
#include "logfe/functionals.hpp"
#include "logfe/inequalities.hpp"

using namespace logfe;

namespace {

FamilyConfig config(FamilyId id, const std::string& base, std::vector<double> seq) {
  FamilyConfig f;
  f.id = id;
  f.base = ClosedFormFamily::parse(base);
  f.seq = std::move(seq);
  return f;
}

std::vector<double> doubling(double first, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = first;
    first *= 2.0;
  }
  return v;
}

std::vector<double> halving(double first, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = first;
    first *= 0.5;
  }
  return v;
}

RadialDensity on_default_grid(const ClosedFormFamily& fam) {
  auto g = std::make_shared<RadialGrid>(make_radial_grid(2048, 100.0, Grading::geometric));
  return discretize(fam, g);
}

}  // namespace

TEST_SUITE("divergence") {

TEST_CASE("scale family toward infinity") {
  auto f = config(FamilyId::Scale, "rho-star", doubling(4.0, 6));
  CHECK(direction_of(f) == +1);

  auto members = make_family(f);
  REQUIRE(members.size() == 6);
  for (size_t i = 0; i < members.size(); ++i) {
    CHECK(members[i].mass == 1.0);  // carried exactly, not re-quadratured
    CHECK(quadrature_mass(members[i]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(members[i].grid->R_max == doctest::Approx(100.0 / f.seq[i]));
  }

  // with a = 0 both surviving terms shift exactly linearly in log lambda
  auto est = measure_slope(f, FreeEnergyParams{0.0, -3.0, 1.0, 1.0});
  CHECK(est.family == FamilyId::Scale);
  CHECK(est.direction == +1);
  CHECK(est.analytic == doctest::Approx(-1.0));
  CHECK(est.fitted == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(est.rel_error < 1e-6);
  CHECK(est.confirmed);
  for (size_t i = 1; i < est.energy.size(); ++i) CHECK(est.energy[i] < est.energy[i - 1]);
  CHECK(est.functional.find("b=-3") != std::string::npos);
  CHECK(est.abscissa.front() == doctest::Approx(std::log(4.0)));
}

TEST_CASE("scale family toward zero") {
  auto f = config(FamilyId::Scale, "annulus-bump", halving(0.25, 5));
  CHECK(direction_of(f) == -1);

  // pure entropy load: F drops as 2 log lambda exactly
  auto est0 = measure_slope(f, FreeEnergyParams{0.0, 0.0, 1.0, 1.0});
  CHECK(est0.analytic == doctest::Approx(2.0));
  CHECK(est0.fitted == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(est0.confirmed);  // positive coefficient, lambda -> 0: energy -> -infinity

  // with a moment load the asymptote gains -2 a M log lambda
  auto est1 = measure_slope(f, FreeEnergyParams{1.0, 0.5, 1.0, 1.0});
  CHECK(est1.analytic == doctest::Approx(0.5));
  CHECK(est1.rel_error < 0.02);
  CHECK(est1.confirmed);

  // the moment recenters on the log moment of the base profile
  const RadialDensity base = on_default_grid(f.base);
  CHECK(est1.potential_term.back() + 2.0 * std::log(f.seq.back()) ==
        doctest::Approx(log_moment(base)).epsilon(1e-3));

  // this route needs support separated from the origin
  auto bad = config(FamilyId::Scale, "gaussian", halving(0.25, 5));
  CHECK_THROWS_AS(make_family(bad), std::invalid_argument);
}

TEST_CASE("two-bubble family") {
  auto f = config(FamilyId::TwoBubble, "annulus-bump", halving(0.125, 5));
  f.eps = 0.3;

  auto members = make_family(f);
  REQUIRE(members.size() == 5);
  for (size_t i = 0; i < members.size(); ++i) {
    CHECK(members[i].mass == 1.0);
    CHECK(quadrature_mass(members[i]) == doctest::Approx(1.0).epsilon(1e-8));
    // the gap (2, 1/lambda) between the bubbles carries no mass
    const RadialGrid& g = *members[i].grid;
    const int j = g.index_at_or_above(0.5 * (2.0 + 1.0 / f.seq[i]));
    REQUIRE(j < g.N);
    CHECK(members[i].values[j] == 0.0);
  }

  auto est = measure_slope(f, FreeEnergyParams{2.0, 1.5, 1.0, 1.0});
  CHECK(est.analytic == doctest::Approx(0.165));  // 2 eps ((1 - eps/2) b + 1 - a)
  CHECK(est.rel_error < 0.005);
  CHECK(est.confirmed);
  CHECK(est.direction == -1);
  for (size_t i = 1; i < est.energy.size(); ++i) CHECK(est.energy[i] < est.energy[i - 1]);

  // sqrt realization: the kinetic energy decouples into (1-eps) K + eps lambda^2 K
  auto waves = make_wave_family(f);
  REQUIRE(waves.size() == 5);
  const double kb = kinetic(sqrt_of(on_default_grid(f.base)));
  for (size_t i = 0; i < waves.size(); ++i) {
    const double lam = f.seq[i];
    CHECK(kinetic(waves[i]) ==
          doctest::Approx((0.7 + 0.3 * lam * lam) * kb).epsilon(1e-5));
  }

  auto estw = measure_slope(f, SchrodingerParams{1.0, 3.0, 0.5, 1.0});
  CHECK(estw.analytic == doctest::Approx(0.63));  // eps M (2 g - 4 al + (2 - eps) b M)
  CHECK(estw.rel_error < 0.01);
  CHECK(estw.confirmed);
  CHECK(estw.kinetic_term.back() < estw.kinetic_term.front());  // bounded, no log growth
}

TEST_CASE("lattice family") {
  auto f = config(FamilyId::Lattice, "unit-ball-bump", {2.0, 3.0, 4.0, 6.0, 8.0});
  f.A = 4.0;

  auto terms = lattice_terms(f);
  REQUIRE(terms.size() == 5);

  const RadialDensity base = on_default_grid(f.base);
  const double S = entropy(base, 1.0);
  const double I = interaction(base);

  // disjoint bumps: entropy is exactly S - 2 log(n eps) = S + 2(A-1) log n
  for (const auto& t : terms) {
    CHECK(t.eps == doctest::Approx(std::pow(t.n, -4.0)));
    CHECK(t.entropy_rel == doctest::Approx(S + 6.0 * std::log(t.n)).epsilon(1e-12));
  }

  // bump self-energy: the dilation identity reproduced by the quadrature
  CHECK(interaction(scale_density(base, 16.0)) ==
        doctest::Approx(I + std::log(1.0 / 16.0)).epsilon(1e-9));

  // eps-bumps are nearly point masses: moment close to the lattice mean
  for (const auto& t : {terms.front(), terms.back()}) {
    double mean = 0.0;
    const int n = int(t.n);
    for (int k = 1; k <= n; ++k)
      for (int l = 1; l <= n; ++l) mean += std::log(1.0 + k * k + l * l);
    mean /= double(n) * double(n);
    CHECK(t.potential == doctest::Approx(mean).epsilon(1e-4));
  }

  // n = 2: eight ordered pairs at distance 1, four at sqrt(2)
  {
    const double cross = 8.0 * std::log(1.0) + 4.0 * std::log(std::sqrt(2.0));
    const double expect = (I + std::log(terms[0].eps)) / 4.0 + cross / 16.0;
    CHECK(terms[0].interaction == doctest::Approx(expect).epsilon(1e-12));
  }

  // negative entropy coefficient: the concentration term drives F down
  auto est = measure_slope(f, FreeEnergyParams{0.0, 0.0, -1.0, 1.0});
  CHECK(est.analytic == doctest::Approx(-6.0));
  CHECK(est.fitted == doctest::Approx(-6.0).epsilon(1e-10));
  CHECK(est.confirmed);
  for (size_t i = 1; i < est.energy.size(); ++i) CHECK(est.energy[i] < est.energy[i - 1]);
  for (size_t i = 1; i < est.param.size(); ++i) {
    const double dlog = std::log(est.param[i] / est.param[i - 1]);
    CHECK(est.entropy_term[i] - est.entropy_term[i - 1] ==
          doctest::Approx(6.0 * dlog).epsilon(1e-12));
  }

  // a moment load shifts the slope by 2 a; finite n wobble stays within 15%
  auto est2 = measure_slope(f, FreeEnergyParams{1.0, 0.0, -1.0, 1.0});
  CHECK(est2.analytic == doctest::Approx(-4.0));
  CHECK(std::abs(est2.fitted - est2.analytic) < 0.15 * std::abs(est2.analytic));

  f.A = 1.5;  // eps = 2^-1.5 > 1/4: bumps would overlap
  CHECK_THROWS_AS(lattice_terms(f), std::invalid_argument);
}

TEST_CASE("wave scale family") {
  auto f = config(FamilyId::WaveScale, "annulus-bump", halving(0.25, 6));

  auto waves = make_wave_family(f);
  REQUIRE(waves.size() == 6);
  for (const auto& u : waves) CHECK(u.mass == doctest::Approx(1.0).epsilon(1e-12));

  auto est = measure_slope(f, SchrodingerParams{0.0, 1.0, 0.0, 1.0});
  CHECK(est.analytic == doctest::Approx(1.0));  // M (beta M - 4 alpha + 2 gamma)
  CHECK(est.rel_error < 0.02);
  CHECK(est.confirmed);

  // kinetic term is o(log lambda): it scales down by exactly lambda^2
  for (size_t i = 1; i < est.kinetic_term.size(); ++i)
    CHECK(est.kinetic_term[i] ==
          doctest::Approx(0.25 * est.kinetic_term[i - 1]).epsilon(1e-9));
  CHECK(est.kinetic_term.back() / std::abs(std::log(f.seq.back())) < 1e-3);

  CHECK_THROWS_AS(measure_slope(f, FreeEnergyParams{0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_family(f), std::invalid_argument);
}

TEST_CASE("translate family") {
  auto f = config(FamilyId::Translate, "gaussian", doubling(8.0, 6));

  auto est = measure_slope(f, FreeEnergyParams{-0.5, 1.0, 1.0, 1.0});
  CHECK(est.analytic == doctest::Approx(-1.0));
  CHECK(est.rel_error < 0.01);
  CHECK(est.confirmed);

  // translation leaves entropy and interaction untouched
  for (size_t i = 0; i < est.param.size(); ++i) {
    CHECK(est.entropy_term[i] == est.entropy_term[0]);
    CHECK(est.interaction_term[i] == est.interaction_term[0]);
  }
  // the moment grows like 2 M log d
  CHECK(est.potential_term.back() ==
        doctest::Approx(2.0 * std::log(256.0)).epsilon(1e-4));

  auto estw = measure_slope(f, SchrodingerParams{-0.5, 0.3, 0.2, 1.0});
  CHECK(estw.analytic == doctest::Approx(-2.0));
  CHECK(estw.rel_error < 0.01);
  CHECK(estw.confirmed);
  CHECK(estw.kinetic_term.front() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(estw.kinetic_term.back() == estw.kinetic_term.front());

  // the offsets must run outward, and there is no radial realization
  auto inward = config(FamilyId::Translate, "gaussian", halving(256.0, 6));
  CHECK_THROWS_AS(measure_slope(inward, FreeEnergyParams{-0.5, 0.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_family(f), std::invalid_argument);
}

TEST_CASE("slope fit uses the tail half of the members") {
  auto f = config(FamilyId::Scale, "rho-star", doubling(1.0, 6));
  auto est = measure_slope(f, FreeEnergyParams{0.5, -4.0, 1.0, 1.0});
  CHECK(est.analytic == doctest::Approx(-2.0));
  CHECK(est.rel_error < 0.04);
  CHECK(est.confirmed);

  // a fit over all members is polluted by the pre-asymptotic head, where the
  // moment term still moves substantially
  const size_t m = est.abscissa.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += est.abscissa[i];
    sy += est.energy[i];
    sxx += est.abscissa[i] * est.abscissa[i];
    sxy += est.abscissa[i] * est.energy[i];
  }
  const double full = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(std::abs(full - est.analytic) > std::abs(est.fitted - est.analytic));
}

TEST_CASE("witnesses confirm every sampled unbounded cell") {
  struct Cell {
    double a, b;
  };
  const Cell cells[] = {{-0.5, -1.0}, {0.0, -3.0},  {0.5, 0.0},
                        {2.0, 1.5},   {3.0, 2.5},   {-0.1, -2.5}};
  for (const auto& c : cells) {
    CAPTURE(c.a);
    CAPTURE(c.b);
    auto cfg = witness_config(c.a, c.b);
    REQUIRE(cfg.has_value());
    CHECK(to_string(cfg->id) == classify_free_energy(c.a, c.b).witness);
    auto est = measure_slope(*cfg, FreeEnergyParams{c.a, c.b, 1.0, 1.0});
    CHECK(est.confirmed);
    CHECK(est.direction * est.fitted < 0.0);
  }

  // Bounded and Unknown points name no family; the (1, 0) corner diverges
  // only along mixed routes and is flagged without a runnable witness
  CHECK(!witness_config(0.5, -1.0).has_value());
  CHECK(!witness_config(2.0, 1.0).has_value());
  CHECK(!witness_config(1.0, 0.0).has_value());
  CHECK(classify_free_energy(1.0, 0.0).region == Region::Unbounded);

  const SchrodingerParams sp[] = {
      {1.0, 3.0, 0.5, 1.0}, {0.0, 1.0, 0.0, 1.0}, {-0.5, 0.0, 0.0, 1.0}};
  for (const auto& p : sp) {
    CAPTURE(p.alpha);
    CAPTURE(p.beta);
    auto cfg = witness_config(p);
    REQUIRE(cfg.has_value());
    CHECK(to_string(cfg->id) == classify_schrodinger(p).witness);
    CHECK(cfg->base.M == p.M);
    auto est = measure_slope(*cfg, p);
    CHECK(est.confirmed);
    CHECK(est.direction * est.fitted < 0.0);
  }
  CHECK(!witness_config(SchrodingerParams{1.0, 0.0, -1.0, 1.0}).has_value());
  CHECK(!witness_config(SchrodingerParams{1.0, 2.5, -1.0, 1.0}).has_value());
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(make_family(config(FamilyId::Scale, "rho-star", {2.0, 4.0, 8.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_family(config(FamilyId::Scale, "rho-star", {2.0, 8.0, 4.0, 16.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_family(config(FamilyId::Scale, "rho-star", {-1.0, 2.0, 4.0, 8.0})),
                  std::invalid_argument);

  CHECK_THROWS_AS(
      make_family(config(FamilyId::TwoBubble, "gaussian", halving(0.25, 4))),
      std::invalid_argument);
  CHECK_THROWS_AS(
      make_family(config(FamilyId::TwoBubble, "annulus-bump", halving(0.5, 4))),
      std::invalid_argument);
  auto tb = config(FamilyId::TwoBubble, "annulus-bump", halving(0.25, 4));
  tb.eps = 1.2;
  CHECK_THROWS_AS(make_family(tb), std::invalid_argument);

  CHECK_THROWS_AS(lattice_terms(config(FamilyId::Lattice, "annulus-bump", {2, 3, 4, 6})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      lattice_terms(config(FamilyId::Lattice, "unit-ball-bump", {2.0, 2.5, 3.0, 4.0})),
      std::invalid_argument);
  CHECK_THROWS_AS(measure_slope(config(FamilyId::Lattice, "unit-ball-bump", {2, 3, 4, 6}),
                                SchrodingerParams{0.0, 1.0, 0.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(measure_slope(config(FamilyId::Scale, "rho-star", doubling(2.0, 4)),
                                SchrodingerParams{0.0, 1.0, 0.0, 1.0}),
                  std::invalid_argument);

  // functional mass must match the family mass
  CHECK_THROWS_AS(measure_slope(config(FamilyId::Scale, "rho-star", doubling(2.0, 4)),
                                FreeEnergyParams{0.0, -3.0, 1.0, 2.0}),
                  std::invalid_argument);

  for (auto id : {FamilyId::Translate, FamilyId::Scale, FamilyId::TwoBubble,
                  FamilyId::Lattice, FamilyId::WaveScale})
    CHECK(parse_family_id(to_string(id)) == id);
  CHECK(parse_family_id("two_bubble") == FamilyId::TwoBubble);
  CHECK_THROWS_AS(parse_family_id("SCALE_TO_ZERO"), std::invalid_argument);
}

}  // TEST_SUITE
