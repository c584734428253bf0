#pragma once

// Explicit finite-volume solver for the drift-diffusion gradient flow of the
// free energy on a uniform radial grid. Fluxes use the exponential-fitting
// face form, so cell masses telescope exactly and the discrete Gibbs profile
// proportional to e^-Phi is a fixed point to roundoff.

#include <memory>
#include <vector>

#include "logfe/density.hpp"
#include "logfe/functionals.hpp"

namespace logfe {

struct FlowConfig {
  FreeEnergyParams params;
  double dt = 0.0;
  long steps = 0;
  std::shared_ptr<const RadialGrid> grid;  // uniform grading required
  double stop = 0.0;  // steady when |dF| / (dt max(1,|F|)) < stop; 0 disables
};

struct FlowSample {
  double time = 0.0;
  double free_energy = 0.0;
  double dissipation = 0.0;
  double mass = 0.0;
};

struct FlowState {
  double time = 0.0;
  RadialDensity density;
  std::vector<FlowSample> history;  // one sample per accepted step, plus t = 0
  bool steady = false;              // stop criterion met before the step cap
};

// d/dr (log rho + a log(1+r^2) + (4 pi b / M) W) on the N+1 cell faces; the
// entries at the center and the outer wall are zero (no-flux ends).
std::vector<double> drift_field(const RadialDensity& rho, const FreeEnergyParams& p);

// D[rho] = int rho |drift|^2 with the logarithmic face mean of rho, so the
// value vanishes to roundoff exactly where the drift does.
double dissipation(const RadialDensity& rho, const FreeEnergyParams& p);

// State at t = 0 with the floor applied and the first history sample taken.
FlowState flow_init(const FlowConfig& cfg, const RadialDensity& initial);

// One accepted Euler step in flux form. Appends a history sample; throws when
// the Lyapunov check fails (F increased beyond tolerance: dt too large).
FlowState flow_step(FlowState state, const FlowConfig& cfg);

// Run from the initial density until the step cap or the stop criterion.
FlowState flow_run(const FlowConfig& cfg, const RadialDensity& initial);

}  // namespace logfe
