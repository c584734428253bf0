#pragma once

// Constrained minimization of the Schrodinger energy over the sphere
// ||u||_2^2 = M by projected Barzilai-Borwein descent with an Armijo
// backtracking guard. The gradient is the exact nodal derivative of the
// discrete energy on uniform grids, so finite-difference checks hold to
// roundoff and the line search cannot stall on discretization mismatch.

#include <memory>
#include <vector>

#include "logfe/density.hpp"
#include "logfe/functionals.hpp"

namespace logfe {

struct MinimizeOptions {
  double step = 0.5;    // first trial step; afterwards BB proposes, Armijo guards
  int max_iters = 2000;
  double tol = 1e-6;    // stop when the EL residual falls below this
  WaveFunction init;    // empty values: sqrt(M mu) on a uniform 512 x 40 grid
  bool allow_unknown = false;  // run even where boundedness is an open case
};

struct GroundStateReport {
  WaveFunction minimizer;  // renormalized: quadrature mass M to roundoff
  double energy = 0.0;
  double theta = 0.0;         // multiplier estimate <grad, u> / (2M)
  double residual = 0.0;      // ||projected gradient||_2 / ||u||_2
  std::vector<double> trace;  // energy per accepted iterate; trace[0] = E(init)
  int iterations = 0;         // accepted descent steps
  bool converged = false;     // residual < tol within the iteration cap
};

// Exact nodal gradient field g of the discrete energy in the weighted L2
// pairing <f, h> = 2 pi sum w_i f_i h_i: the continuum form is
// 2(-Delta u + alpha V u + 4 pi beta W u + gamma (log u^2 + 1) u) with
// V = 2 log(1+r^2) and W = (-Delta)^-1 u^2. Uniform grids only.
std::vector<double> energy_gradient(const WaveFunction& u, const SchrodingerParams& p);

// ||G - (<G,u>/<u,u>) u||_2 / ||u||_2; zero exactly at constrained critical
// points of the discrete energy.
double el_residual(const WaveFunction& u, const SchrodingerParams& p);

// sqrt(M mu): optimizer of the Euclidean log-Sobolev branch and a good
// basin seed for the trap and Gausson problems.
WaveFunction default_initial(double M, std::shared_ptr<const RadialGrid> grid);

// Rejects parameters classified Unbounded (the descent would diverge) and,
// without allow_unknown, parameters whose boundedness is unresolved.
GroundStateReport minimize(const SchrodingerParams& p, const MinimizeOptions& opts = {});

}  // namespace logfe
