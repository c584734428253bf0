#pragma once

// Energy functionals over radial and planar densities. All integrals are over
// the plane; radial quadrature is combined with the analytic tail/origin
// attachments of the density so that truncation stays below grid error.

#include <memory>
#include <vector>

#include "logfe/density.hpp"

namespace logfe {

struct FreeEnergyParams {
  double a = 0.0;  // potential-moment coefficient
  double b = 0.0;  // interaction coefficient (scaled by 1/M)
  double c = 1.0;  // entropy coefficient
  double M = 1.0;
};

struct SchrodingerParams {
  double alpha = 0.0;  // confining potential 2*log(1+|x|^2)
  double beta = 0.0;   // attractive Coulomb coupling
  double gamma = 0.0;  // logarithmic nonlinearity
  double M = 1.0;
};

// int rho log(rho / M); values below 1e-300 contribute zero.
double entropy(const RadialDensity& rho, double M);
double entropy(const PlanarDensity& rho, double M);

// int rho log rho (the un-normalized entropy entering the wave energy)
double entropy_raw(const RadialDensity& rho);

// int log(1 + |x|^2) rho
double potential_moment(const RadialDensity& rho);
double potential_moment(const PlanarDensity& rho);

// int log(1 + |x - x0|^2) rho(|x|) dx for |x0| = d, via the exact angular
// mean of the kernel over circles.
double potential_moment_translated(const RadialDensity& rho, double d);

// int 2 log|x| rho; throws when mass piles up on the first grid node, where
// the discrete value is meaningless.
double log_moment(const RadialDensity& rho);
double log_moment(const PlanarDensity& rho);

// I[rho] = int int rho(x) log|x-y| rho(y) dx dy through the nested form of
// the Newton kernel: I = 2 int_0^inf log(s) rho(s) m(s) 2*pi*s ds with
// m(s) the mass inside radius s.
double interaction(const RadialDensity& rho);

// Direct pair sum over cells with the exact same-cell correction
// m_c^2 (log h + c0). Cost grows like n^4; grids beyond the tractable cap
// are rejected.
double interaction_planar(const PlanarDensity& rho);

// c0 = mean of log|x-y| over independent uniform points of the unit square
double planar_self_cell_constant();

// W = (-Delta)^-1 rho with W(r) ~ -(M / 2 pi) log r at infinity:
// W(r) = -[ log(r) int_0^r rho s ds + int_r^inf rho log(s) s ds ].
struct PoissonField {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;
  double mass = 0.0;
};
PoissonField poisson_potential(const RadialDensity& rho);
double poisson_potential_at(const RadialDensity& rho, double r);

// 2 pi int |u'(r)|^2 r dr. Geometric grids differentiate in the uniform
// grading coordinate (4th order); uniform grids use the face-based quadratic
// form that the descent modules share.
double kinetic(const WaveFunction& u);

// F[rho] = c * entropy(rho, M) + a * potential_moment - (b / M) * interaction
double free_energy(const RadialDensity& rho, const FreeEnergyParams& p);

// G_a[rho] = entropy(rho, M) + a * log_moment + 2 (1 - a) interaction / M;
// positively 1-homogeneous in the mass and invariant under dilations.
double g_functional(const RadialDensity& rho, double a);

// J_eta[rho] = entropy(rho, M) + eta * potential_moment
double j_functional(const RadialDensity& rho, double eta);

// E[u] = kinetic + 2 alpha PM(rho) - beta I[rho] + gamma int rho log rho,
// rho = |u|^2. The three-argument form lets the caller supply a density
// with tail/origin attachments matching u.
double schrodinger_energy(const WaveFunction& u, const SchrodingerParams& p);
double schrodinger_energy(const WaveFunction& u, const SchrodingerParams& p,
                          const RadialDensity& rho);

}  // namespace logfe
