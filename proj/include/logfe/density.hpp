#pragma once

// Discretized radial densities and wave functions. A density may carry two
// analytic attachments: a tail series describing rho(r) for r >= R_max and
// an origin series describing an integrable power singularity on (0, r_cut].
// Integrals over such densities combine closed-form series moments with grid
// quadrature on the remaining subrange; the quadrature never has to resolve
// what the series already represent exactly.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "logfe/grid.hpp"
#include "logfe/series.hpp"

namespace logfe {

struct RadialDensity {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;  // rho(r_i) >= 0
  double mass = 0.0;           // stored M

  std::optional<PowerLogSeries> tail;  // rho(r) for r >= R_max

  // origin singularity: series valid on (0, nodes[origin_j0]]; quadrature of
  // density integrals starts at node origin_j0. origin_log is log(rho).
  std::optional<PowerLogSeries> origin;
  std::optional<PowerLogSeries> origin_log;
  int origin_j0 = 0;

  std::function<double(double)> evaluator;  // optional exact profile

  int core_start() const { return origin ? origin_j0 : 0; }
  double origin_cut() const { return origin ? grid->nodes[origin_j0] : 0.0; }
};

struct WaveFunction {
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> values;  // u(r_i), any sign
  double mass = 0.0;           // 2*pi*int u^2 r dr
};

// Quadrature + analytic-attachment mass integral of rho over the plane.
double quadrature_mass(const RadialDensity& rho);

// Validating constructor. With renormalize, values and attachments are
// scaled so the quadrature mass equals M exactly; otherwise a mass mismatch
// beyond tol (relative) throws.
RadialDensity make_radial_density(std::shared_ptr<const RadialGrid> grid,
                                  std::vector<double> values, double M,
                                  std::optional<PowerLogSeries> tail = {},
                                  std::optional<PowerLogSeries> origin = {},
                                  std::optional<PowerLogSeries> origin_log = {},
                                  int origin_j0 = 0,
                                  std::function<double(double)> evaluator = {},
                                  bool renormalize = false, double tol = 1e-6);

WaveFunction make_wave_function(std::shared_ptr<const RadialGrid> grid,
                                std::vector<double> values, double M,
                                bool renormalize = true);

// rho = u^2, sharing the grid; no analytic attachments
RadialDensity density_of(const WaveFunction& u);

// u = sqrt(rho) with the node values and stored mass taken verbatim
WaveFunction sqrt_of(const RadialDensity& rho);

// Mass-preserving dilation rho_lambda(x) = lambda^2 rho(lambda x) realized on
// the covariant grid with R_max/lambda, so node values map exactly. Dyadic
// lambda keeps the correspondence bit-exact.
RadialDensity scale_density(const RadialDensity& rho, double lambda);

// u_lambda(x) = lambda u(lambda x); preserves the L^2 mass.
WaveFunction scale_wave(const WaveFunction& u, double lambda);

// int_{R^2} f  =  2*pi*(sum w_i f_i)  plus analytic tail correction when a
// descriptor for f beyond R_max is supplied.
double integrate_radial(const RadialGrid& g, const std::vector<double>& f,
                        const std::optional<PowerLogSeries>& tail = {});

// Cell-center sampling of a radial profile centered at (cx, cy), mass
// renormalized to M. support_radius is the radius outside which the profile
// is negligible (compact support or <= 0.5% of the mass); the sample is
// rejected when that disk does not fit in the grid.
PlanarDensity sample_planar(const std::function<double(double)>& profile, double M,
                            double support_radius, double cx, double cy,
                            const PlanarGrid& grid);

PlanarDensity sample_planar(const RadialDensity& rho, double cx, double cy,
                            const PlanarGrid& grid);

}  // namespace logfe
