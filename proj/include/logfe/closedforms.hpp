#pragma once

// Closed-form density families and their analytic integral values; ground
// truth for the verification suite.
//
//   rho_star        M / (pi (1+r^2)^2)
//   rho_eta         M (eta-1) / (pi (1+r^2)^eta),             eta > 1
//   k_minimizer     M ((1-a)/pi) lam^2 / (r^{2a} (lam^2 + r^{2-2a})^2)
//   gaussian        M e^{-r^2/2} / (2 pi)
//   annulus_bump    normalized exp(-1/((r-1)(2-r))) on 1 < r < 2
//   unit_ball_bump  normalized exp(-1/(r(1-r)))     on 0 < r < 1

#include <map>
#include <memory>
#include <string>

#include "logfe/density.hpp"

namespace logfe {

enum class FamilyKind { rho_star, rho_eta, k_minimizer, gaussian, annulus_bump, unit_ball_bump };

struct ClosedFormFamily {
  FamilyKind kind = FamilyKind::rho_star;
  double eta = 2.0;     // rho_eta
  double a = 0.0;       // k_minimizer
  double lambda = 1.0;  // k_minimizer
  double M = 1.0;

  static ClosedFormFamily parse(const std::string& spec);  // "name:key=val,..."
  std::string name() const;
};

// profile value; r=0 with an r^{-2a} singularity returns +infinity
double evaluate(const ClosedFormFamily& fam, double r);

// radius outside which at most 0.5% of the mass lives
double support_radius(const ClosedFormFamily& fam);

// R_max large enough for the family's analytic tail series to converge
double min_grid_radius(const ClosedFormFamily& fam);

RadialDensity discretize(const ClosedFormFamily& fam, std::shared_ptr<const RadialGrid> grid);

// closed-form reference values; throws on unknown quantity ids.
// ids: mass, entropy.rho_eta(eta,M), potential_moment.rho_eta(eta,M),
//      entropy.gaussian(M), interaction.gaussian(M), interaction.rho_star(M),
//      kinetic.sqrt_gaussian(M), kinetic.sqrt_rho_star(M),
//      log_moment.rho_star, j_min(eta,M), K(a), loghls_constant(M), C(a,b)
double analytic_value(const std::string& quantity, const std::map<std::string, double>& params);

// tau(z) = |t|^{2a} rho(t) at t = |z|^{1/(1-a)}; mass (1-a) M
RadialDensity radial_substitution(const RadialDensity& rho, double a);

}  // namespace logfe
