#pragma once

// Radial quadrature grids for integrals  int_0^Rmax f(r) r dr  and the
// uniform planar grid used by non-radial constructions.
//
// geometric grading: nodes are images of a uniform grid in xi under
//   r = Rmax * (exp(kappa*xi) - 1) / (exp(kappa) - 1),   xi in (0, 1],
// integrated by an endpoint-corrected trapezoid rule (Gregory, order 6)
// in xi. The xi=0 node carries zero measure and is not stored, so all
// nodes are strictly positive and all weights strictly positive.
//
// uniform grading: midpoint rule, nodes (i-1/2)h. Integrates r dr exactly
// (disk areas are exact) and its prefix sums are cell-aligned, which the
// finite-volume flow solver relies on for exact mass conservation.

#include <vector>

namespace logfe {

enum class Grading { uniform, geometric };

struct RadialGrid {
  std::vector<double> nodes;    // strictly increasing, all > 0
  std::vector<double> weights;  // sum w_i f(r_i) ~ int_0^Rmax f r dr
  double R_max = 0.0;
  int N = 0;  // node count
  Grading grading = Grading::geometric;
  double kappa = 0.0;  // map stiffness (geometric only)

  // xi-space data kept for prefix/subrange rules (geometric only)
  double dxi = 0.0;
  std::vector<double> jac;  // phi(xi_j) * phi'(xi_j)

  // smallest index with nodes[i] >= r, or N if none
  int index_at_or_above(double r) const;
};

RadialGrid make_radial_grid(int N, double R_max, Grading grading);

// core integral  int_0^Rmax f(r) r dr  (no tail handling here)
double integrate(const RadialGrid& g, const std::vector<double>& f);

// int_{r_{j0}}^{Rmax} f(r) r dr over the node subrange [j0, N); j0 = 0
// integrates from the origin, so prefix[i] + integrate_from(i) recovers the
// full integral for i >= 1
double integrate_from(const RadialGrid& g, const std::vector<double>& f, int j0);

// P_i ~ int_0^{r_i} f(r) r dr for every node
std::vector<double> prefix_integrals(const RadialGrid& g, const std::vector<double>& f);

// P_i ~ int_{r_{j0}}^{r_i} f(r) r dr for i >= j0 (0 below); pairs with an
// analytic handling of (0, r_{j0}] when f is singular there
std::vector<double> prefix_integrals_from(const RadialGrid& g, const std::vector<double>& f,
                                          int j0);

struct PlanarGrid {
  double h = 0.0;                // cell side
  double L = 0.0;                // half-width; domain [-L, L]^2
  int n = 0;                     // cells per side
  std::vector<double> centers;  // cell-center coordinate per index, shared by x and y
};

PlanarGrid make_planar_grid(double h, double L);

struct PlanarDensity {
  PlanarGrid grid;
  std::vector<double> values;  // row-major, values[iy * n + ix] >= 0
  double mass = 0.0;           // h^2 * sum(values)
};

}  // namespace logfe
