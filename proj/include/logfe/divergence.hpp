#pragma once

// Unboundedness witnesses as executable families. Each FamilyId is one escape
// route of the free-energy / Schrodinger-Poisson functionals: a curve of
// densities (or wave functions) along which the functional drops to -infinity
// at a known rate in the log of the family parameter. measure_slope evaluates
// the functional along the curve, fits that coefficient on the tail of the
// sequence, and compares it with the analytic value.

#include <optional>
#include <string>
#include <vector>

#include "logfe/closedforms.hpp"
#include "logfe/functionals.hpp"

namespace logfe {

enum class FamilyId {
  Translate,  // rho(. - x0), |x0| -> infinity
  Scale,      // lambda^2 rho(lambda .), lambda -> infinity or lambda -> 0+
  TwoBubble,  // (1-eps) rho + eps lambda^2 rho(lambda .), lambda -> 0+
  Lattice,    // n x n grid of eps-concentrated bumps, eps = n^-A, n -> infinity
  WaveScale,  // lambda u(lambda .), lambda -> 0+
};

std::string to_string(FamilyId id);
FamilyId parse_family_id(const std::string& name);

struct FamilyConfig {
  FamilyId id = FamilyId::Scale;
  ClosedFormFamily base;    // profile being deformed
  std::vector<double> seq;  // strictly monotone lambda / offset / n values
  double eps = 0.3;         // TwoBubble mixing fraction, in (0,1)
  double A = 4.0;           // Lattice concentration exponent, > 1
  int grid_n = 2048;        // radial resolution of realized members
  double grid_r = 100.0;    // baseline R_max (members may extend it)
};

// +1 when the family parameter increases without bound, -1 when it decreases
// to 0+. The energy diverges to -infinity exactly when slope * direction < 0.
int direction_of(const FamilyConfig& f);

// Materialized members for the families with a radial realization (Scale and
// TwoBubble; every member keeps the base mass exactly). Translate and Lattice
// members are off-center configurations of the unchanged radial profile, so
// measure_slope evaluates their terms semi-analytically instead.
std::vector<RadialDensity> make_family(const FamilyConfig& f);

// sqrt realization of the same members (TwoBubble, WaveScale)
std::vector<WaveFunction> make_wave_family(const FamilyConfig& f);

// Exact term values for the lattice member R_{eps,n} (n^2 bumps of width eps
// at the integer points of [1,n]^2): entropy from bump disjointness,
// interaction from the circular mean of the log kernel, potential moment from
// the translated angular-mean kernel.
struct LatticeTerms {
  double n = 0.0;
  double eps = 0.0;
  double entropy_rel = 0.0;  // int R log(R / M)
  double potential = 0.0;    // int log(1 + |x|^2) R
  double interaction = 0.0;  // I[R]
};
std::vector<LatticeTerms> lattice_terms(const FamilyConfig& f);

struct SlopeEstimate {
  FamilyId family = FamilyId::Scale;
  std::string functional;  // formatted functional id + parameters
  int direction = +1;

  std::vector<double> param;     // raw family parameter per member
  std::vector<double> abscissa;  // log(param)
  std::vector<double> energy;    // functional value per member

  // raw term values per member (zero where a term does not apply)
  std::vector<double> entropy_term;      // int rho log(rho / M)
  std::vector<double> potential_term;    // int log(1 + |x|^2) rho
  std::vector<double> interaction_term;  // I[rho]
  std::vector<double> kinetic_term;      // 2 pi int |u'|^2 r dr

  double fitted = 0.0;     // OLS slope of energy vs abscissa over the tail half
  double analytic = 0.0;   // predicted coefficient of the log parameter
  double rel_error = 0.0;  // |fitted - analytic| / |analytic|
  bool confirmed = false;  // energy -> -infinity along the family, fit within 5%
};

// Predicted coefficient of log(parameter) in the energy along the family.
double analytic_slope(const FamilyConfig& f, const FreeEnergyParams& p);
double analytic_slope(const FamilyConfig& f, const SchrodingerParams& p);

SlopeEstimate measure_slope(const FamilyConfig& f, const FreeEnergyParams& p);
SlopeEstimate measure_slope(const FamilyConfig& f, const SchrodingerParams& p);

// Ready-to-run family for the witness named by the classifier at (a, b) or at
// p. Empty when the point is not Unbounded, or when it is Unbounded but no
// single family realizes the divergence (the (1, 0) free-energy corner).
std::optional<FamilyConfig> witness_config(double a, double b);
std::optional<FamilyConfig> witness_config(const SchrodingerParams& p);

}  // namespace logfe
