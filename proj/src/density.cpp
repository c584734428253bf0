#include "logfe/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace logfe {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double quadrature_mass(const RadialDensity& rho) {
  double s = integrate_from(*rho.grid, rho.values, rho.core_start());
  if (rho.origin) s += rho.origin->integral_origin(rho.origin_cut());
  if (rho.tail) s += rho.tail->integral_tail(rho.grid->R_max);
  return kTwoPi * s;
}

RadialDensity make_radial_density(std::shared_ptr<const RadialGrid> grid,
                                  std::vector<double> values, double M,
                                  std::optional<PowerLogSeries> tail,
                                  std::optional<PowerLogSeries> origin,
                                  std::optional<PowerLogSeries> origin_log, int origin_j0,
                                  std::function<double(double)> evaluator, bool renormalize,
                                  double tol) {
  if (!grid) throw std::invalid_argument("density needs a grid");
  if (int(values.size()) != grid->N) throw std::invalid_argument("value count mismatch");
  if (!(M > 0.0)) throw std::invalid_argument("mass must be positive");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("density values must be >= 0 and finite");
  if (origin) {
    if (origin_j0 < 1 || origin_j0 >= grid->N)
      throw std::invalid_argument("origin model index out of range");
    if (grid->grading != Grading::geometric)
      throw std::invalid_argument("origin models require a geometric grid");
    for (const auto& t : origin->terms())
      if (t.expo <= -2.0) throw std::invalid_argument("origin singularity not integrable");
  }
  if (tail)
    for (const auto& t : tail->terms())
      if (t.expo >= -2.0) throw std::invalid_argument("tail exponent must give integrable mass");

  RadialDensity rho;
  rho.grid = std::move(grid);
  rho.values = std::move(values);
  rho.mass = M;
  rho.tail = std::move(tail);
  rho.origin = std::move(origin);
  rho.origin_log = std::move(origin_log);
  rho.origin_j0 = rho.origin ? origin_j0 : 0;
  rho.evaluator = std::move(evaluator);

  const double mq = quadrature_mass(rho);
  if (!(mq > 0.0)) throw std::invalid_argument("density has no mass on the grid");
  if (renormalize) {
    const double s = M / mq;
    for (double& v : rho.values) v *= s;
    if (rho.tail) rho.tail = *rho.tail * s;
    if (rho.origin) rho.origin = *rho.origin * s;
    if (rho.origin_log) *rho.origin_log += PowerLogSeries::constant(std::log(s));
    if (rho.evaluator) {
      auto base = rho.evaluator;
      rho.evaluator = [base, s](double r) { return s * base(r); };
    }
  } else if (std::abs(mq - M) > tol * M) {
    throw std::invalid_argument("quadrature mass deviates from stored mass beyond tolerance");
  }
  return rho;
}

WaveFunction make_wave_function(std::shared_ptr<const RadialGrid> grid,
                                std::vector<double> values, double M, bool renormalize) {
  if (!grid) throw std::invalid_argument("wave function needs a grid");
  if (int(values.size()) != grid->N) throw std::invalid_argument("value count mismatch");
  if (!(M > 0.0)) throw std::invalid_argument("mass must be positive");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("wave values must be finite");

  WaveFunction u;
  u.grid = std::move(grid);
  u.values = std::move(values);
  std::vector<double> sq(u.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u.values[i] * u.values[i];
  const double mq = kTwoPi * integrate(*u.grid, sq);
  if (!(mq > 0.0)) throw std::invalid_argument("wave function vanishes on the grid");
  if (renormalize) {
    const double s = std::sqrt(M / mq);
    for (double& v : u.values) v *= s;
    u.mass = M;
  } else {
    if (std::abs(mq - M) > 1e-6 * M)
      throw std::invalid_argument("wave mass deviates from stored mass");
    u.mass = M;
  }
  return u;
}

RadialDensity density_of(const WaveFunction& u) {
  std::vector<double> sq(u.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u.values[i] * u.values[i];
  return make_radial_density(u.grid, std::move(sq), u.mass, {}, {}, {}, 0, {}, true);
}

WaveFunction sqrt_of(const RadialDensity& rho) {
  // node values pass through untouched and the stored mass is kept: any gap
  // between it and the truncated quadrature mass belongs to the analytic
  // attachments, which a grid wave function cannot carry
  WaveFunction u;
  u.grid = rho.grid;
  u.values.resize(rho.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = std::sqrt(rho.values[i]);
  u.mass = rho.mass;
  return u;
}

RadialDensity scale_density(const RadialDensity& rho, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("scale factor must be positive");
  const RadialGrid& g = *rho.grid;
  auto g2 = std::make_shared<RadialGrid>(make_radial_grid(g.N, g.R_max / lambda, g.grading));
  const double l2 = lambda * lambda;
  std::vector<double> v(rho.values);
  for (double& x : v) x *= l2;
  std::optional<PowerLogSeries> tail, origin, origin_log;
  if (rho.tail) tail = rho.tail->with_scaled_argument(lambda) * l2;
  if (rho.origin) origin = rho.origin->with_scaled_argument(lambda) * l2;
  if (rho.origin_log) {
    origin_log = rho.origin_log->with_scaled_argument(lambda);
    *origin_log += PowerLogSeries::constant(std::log(l2));
  }
  std::function<double(double)> ev;
  if (rho.evaluator) {
    auto base = rho.evaluator;
    ev = [base, lambda, l2](double r) { return l2 * base(lambda * r); };
  }
  return make_radial_density(std::move(g2), std::move(v), rho.mass, std::move(tail),
                             std::move(origin), std::move(origin_log), rho.origin_j0,
                             std::move(ev), false, 1e-9);
}

WaveFunction scale_wave(const WaveFunction& u, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("scale factor must be positive");
  const RadialGrid& g = *u.grid;
  auto g2 = std::make_shared<RadialGrid>(make_radial_grid(g.N, g.R_max / lambda, g.grading));
  std::vector<double> v(u.values);
  for (double& x : v) x *= lambda;
  return make_wave_function(std::move(g2), std::move(v), u.mass, false);
}

double integrate_radial(const RadialGrid& g, const std::vector<double>& f,
                        const std::optional<PowerLogSeries>& tail) {
  double s = integrate(g, f);
  if (tail) s += tail->integral_tail(g.R_max);
  return kTwoPi * s;
}

PlanarDensity sample_planar(const std::function<double(double)>& profile, double M,
                            double support_radius, double cx, double cy,
                            const PlanarGrid& grid) {
  if (!profile) throw std::invalid_argument("profile evaluator missing");
  if (std::max(std::abs(cx), std::abs(cy)) + support_radius > grid.L)
    throw std::invalid_argument("profile support exceeds the planar grid extent");

  PlanarDensity rho;
  rho.grid = grid;
  rho.values.assign(std::size_t(grid.n) * grid.n, 0.0);
  double sum = 0.0;
  for (int iy = 0; iy < grid.n; ++iy) {
    const double dy = grid.centers[iy] - cy;
    for (int ix = 0; ix < grid.n; ++ix) {
      const double dx = grid.centers[ix] - cx;
      const double v = profile(std::hypot(dx, dy));
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("profile produced a negative or non-finite value");
      rho.values[std::size_t(iy) * grid.n + ix] = v;
      sum += v;
    }
  }
  const double mq = sum * grid.h * grid.h;
  if (!(mq > 0.0)) throw std::invalid_argument("profile vanishes on the planar grid");
  const double s = M / mq;
  for (double& v : rho.values) v *= s;
  rho.mass = M;
  return rho;
}

PlanarDensity sample_planar(const RadialDensity& rho, double cx, double cy,
                            const PlanarGrid& grid) {
  // effective support: radius holding all but 0.5% of the quadrature mass
  const double target = 0.005 * rho.mass;
  double tail_mass = rho.tail ? kTwoPi * rho.tail->integral_tail(rho.grid->R_max) : 0.0;
  if (tail_mass > target)
    throw std::invalid_argument("density tail too heavy to sample on a finite grid");
  double support = rho.grid->R_max;
  double acc = tail_mass;
  for (int i = rho.grid->N - 1; i > 0; --i) {
    acc += kTwoPi * rho.grid->weights[i] * rho.values[i];
    if (acc > target) break;
    support = rho.grid->nodes[i];
  }
  const RadialGrid& g = *rho.grid;
  auto look = [&g, &rho](double r) {
    if (rho.evaluator) return rho.evaluator(r);
    if (r >= g.R_max) return rho.tail ? std::max(0.0, rho.tail->eval(r)) : 0.0;
    int i = g.index_at_or_above(r);
    if (i <= 0) return rho.values[0];
    if (i >= g.N) return rho.values[g.N - 1];
    const double t = (r - g.nodes[i - 1]) / (g.nodes[i] - g.nodes[i - 1]);
    return (1.0 - t) * rho.values[i - 1] + t * rho.values[i];
  };
  return sample_planar(look, rho.mass, support, cx, cy, grid);
}

}  // namespace logfe
