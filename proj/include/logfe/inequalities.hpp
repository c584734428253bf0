#pragma once

// Deficit evaluation for the logarithmic interpolation inequalities and
// region classification for the two boundedness phase diagrams (free energy
// in the (a,b) plane, Schrodinger energy in the (gamma, beta) plane).
//
// Every inequality is evaluated exactly as its display is written: the
// report keeps lhs and rhs separate and the claim is deficit = lhs - rhs >= 0.

#include <optional>
#include <string>
#include <vector>

#include "logfe/density.hpp"
#include "logfe/functionals.hpp"

namespace logfe {

enum class InequalityId {
  LogHls,                  // entropy + (2/M) I + M(1+log pi) >= 0
  LogHlsTau,               // tau-interpolated family, tau >= 0
  PotentialVsInteraction,  // 2 PM - M >= (2/M) I
  EntropyPotential,        // entropy + eta PM >= M log((eta-1)/pi), eta > 1
  FreeEnergyBound,         // F_{a,b} >= M C(a,b) on the bounded region
  LogSobEuclidean,         // K >= entropy/2 + (M/2) log(2 pi e^2)
  LogSobScaled,            // the same after u -> lambda u(lambda x)
  LogSobWeissler,          // M log(K/(pi e M)) >= entropy, scale invariant
  KinVsInteraction,        // K >= -I/M + (M/2) log(2e)
  KinVsInteractionScaled,  // the same after u -> lambda u(lambda x)
  ScaleInvariant,          // (M^2/2) log(K/M) >= -I
};

// Canonical spellings: "LOG_HLS", "LOG_HLS_TAU", ... Parsing is
// case-insensitive; unknown names throw.
std::string to_string(InequalityId id);
InequalityId parse_inequality_id(const std::string& name);

// Ids whose left-hand side needs |grad u|^2; they accept wave input only.
bool takes_wave(InequalityId id);

// An inequality id together with its parameters. Only the fields relevant
// for the id are read.
struct InequalityQuery {
  InequalityId id = InequalityId::LogHls;
  double tau = 0.0;     // LogHlsTau, tau >= 0
  double eta = 2.0;     // EntropyPotential, eta > 0
  double lambda = 1.0;  // LogSobScaled / KinVsInteractionScaled, lambda > 0
  double a = 0.0;       // FreeEnergyBound
  double b = -2.0;      // FreeEnergyBound

  static InequalityQuery log_hls();
  static InequalityQuery log_hls_tau(double tau);
  static InequalityQuery potential_vs_interaction();
  static InequalityQuery entropy_potential(double eta);
  static InequalityQuery free_energy_bound(double a, double b);
  static InequalityQuery logsob_euclidean();
  static InequalityQuery logsob_scaled(double lambda);
  static InequalityQuery logsob_weissler();
  static InequalityQuery kin_vs_interaction();
  static InequalityQuery kin_vs_interaction_scaled(double lambda);
  static InequalityQuery scale_invariant();
};

struct DeficitReport {
  InequalityId id = InequalityId::LogHls;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;    // lhs - rhs
  double tolerance = 0.0;
  bool pass = false;       // deficit >= -tolerance
  bool claimed = true;     // false when no bound is asserted for these parameters
  std::string note;        // context, e.g. why a report carries no claim
  std::string provenance;  // grid metadata of the evaluated input
};

// Evaluate a deficit. The mass is taken from the input. Wave ids require a
// WaveFunction, density ids a density; a mismatch throws. Parameters outside
// an id's validity throw, except where the inequality is known to fail
// (EntropyPotential with eta <= 1, FreeEnergyBound outside the bounded
// region): those return a report with claimed=false and deficit/rhs NaN.
DeficitReport deficit(const InequalityQuery& q, const RadialDensity& rho,
                      double tolerance = 1e-4);
DeficitReport deficit(const InequalityQuery& q, const PlanarDensity& rho,
                      double tolerance = 1e-4);
DeficitReport deficit(const InequalityQuery& q, const WaveFunction& u,
                      double tolerance = 1e-4);
// Wave variant with a matched density carrying analytic attachments for the
// rho-based terms (entropy, PM, I); u and rho must share the grid and mass.
DeficitReport deficit(const InequalityQuery& q, const WaveFunction& u,
                      const RadialDensity& rho, double tolerance = 1e-4);

enum class Region { Bounded, Unbounded, Unknown };

std::string to_string(Region r);

struct RegionLabel {
  Region region = Region::Unknown;
  // sharp constant per unit mass, present only where it is known exactly:
  // the b = 2a-2 line with 0 <= a < 1, the b = a-2 >= -2 line, and (0,-2)
  std::optional<double> constant;
  // divergence family able to certify Unbounded; empty when the divergence
  // argument is indirect and no single family witnesses it, as at (1,0)
  std::string witness;
};

// Boundedness of F_{a,b} over nonnegative densities of fixed mass.
RegionLabel classify_free_energy(double a, double b);

// Boundedness of the Schrodinger energy over waves of fixed L2 mass.
RegionLabel classify_schrodinger(const SchrodingerParams& p);

// Best known lower-bound constant per unit mass on the bounded region:
// sharp on the two special lines, elsewhere assembled from the convex
// combinations that prove boundedness (a lower bound, not claimed sharp).
// Empty outside the bounded region.
std::optional<double> best_known_constant(double a, double b);

struct ScanRange {
  double x_min = 0.0, x_max = 0.0;  // a (free energy) or gamma (Schrodinger)
  double y_min = 0.0, y_max = 0.0;  // b (free energy) or beta (Schrodinger)
  double step = 0.0;
};

struct PhasePoint {
  double x = 0.0, y = 0.0;
  RegionLabel label;
};

struct PhaseDiagram {
  std::vector<double> xs, ys;     // axis ticks
  std::vector<PhasePoint> cells;  // x outer, y inner
};

enum class PhaseWhich { FreeEnergy, Schrodinger };

// Label every cell of the rectangular grid x_min + i*step, y_min + j*step.
// Coordinates within 1e-9 of a theorem boundary are snapped onto it, so the
// published polylines are recovered exactly. An inverted range or step <= 0
// yields an empty diagram.
PhaseDiagram scan_free_energy(const ScanRange& r);
PhaseDiagram scan_schrodinger(const ScanRange& r, double alpha, double M);
PhaseDiagram scan_phase_diagram(PhaseWhich which, const ScanRange& r,
                                double alpha = 1.0, double M = 1.0);

}  // namespace logfe
