#include "logfe/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "logfe/inequalities.hpp"

namespace logfe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFloor = 1e-300;  // continuous extension of rho log rho

void require_uniform(const RadialGrid& g) {
  if (g.grading != Grading::uniform)
    throw std::invalid_argument(
        "the descent solver needs a uniform grid: its kinetic form is face-based");
}

double dot(const RadialGrid& g, const std::vector<double>& f, const std::vector<double>& h) {
  double s = 0.0;
  for (int i = 0; i < g.N; ++i) s += g.weights[i] * f[i] * h[i];
  return kTwoPi * s;
}

void renormalize(WaveFunction& u, double M) {
  const double mq = dot(*u.grid, u.values, u.values);
  if (!(mq > 0.0)) throw std::invalid_argument("state must carry positive mass");
  const double s = std::sqrt(M / mq);
  for (double& v : u.values) v *= s;
  u.mass = M;
}

// projected gradient, multiplier and residual in one pass
struct Criticality {
  std::vector<double> projected;
  double theta = 0.0;
  double residual = 0.0;
};

Criticality criticality(const WaveFunction& u, const SchrodingerParams& p) {
  Criticality c;
  c.projected = energy_gradient(u, p);
  const RadialGrid& g = *u.grid;
  const double mq = dot(g, u.values, u.values);
  const double gu = dot(g, c.projected, u.values);
  for (int i = 0; i < g.N; ++i) c.projected[i] -= (gu / mq) * u.values[i];
  c.theta = gu / (2.0 * mq);
  c.residual = std::sqrt(std::max(0.0, dot(g, c.projected, c.projected)) / mq);
  return c;
}

void reject_outside_bounded(const SchrodingerParams& p, bool allow_unknown) {
  const RegionLabel label = classify_schrodinger(p);
  if (label.region == Region::Unbounded) {
    const double cap = std::min(2.0 * p.alpha - p.gamma, 4.0 * p.alpha - 2.0 * p.gamma);
    char buf[256];
    if (p.alpha < 0.0)
      std::snprintf(buf, sizeof buf,
                    "energy is unbounded below: alpha = %g < 0, so translations to "
                    "infinity lower E without limit",
                    p.alpha);
    else
      std::snprintf(buf, sizeof buf,
                    "energy is unbounded below: M*beta = %g exceeds "
                    "min(2*alpha - gamma, 4*alpha - 2*gamma) = %g, so concentrating "
                    "waves lower E without limit",
                    p.M * p.beta, cap);
    throw std::invalid_argument(buf);
  }
  if (label.region == Region::Unknown && !allow_unknown)
    throw std::invalid_argument(
        "no boundedness claim is available for these parameters; "
        "set allow_unknown to attempt the descent anyway");
}

}  // namespace

std::vector<double> energy_gradient(const WaveFunction& u, const SchrodingerParams& p) {
  require_uniform(*u.grid);
  const RadialGrid& g = *u.grid;
  const int N = g.N;
  const double h = g.R_max / N;
  const std::vector<double>& v = u.values;

  std::vector<double> G(N, 0.0);
  for (int k = 0; k < N; ++k) {
    // 2 * (-Delta_h u): the exact derivative of the face-based kinetic form,
    // with a free outer end matching the missing last face
    double lap = 0.0;
    if (k > 0) lap += double(k) * (v[k] - v[k - 1]);
    if (k + 1 < N) lap -= double(k + 1) * (v[k + 1] - v[k]);
    G[k] = 2.0 * lap / (h * h * (double(k) + 0.5));
  }
  if (p.alpha != 0.0)
    for (int k = 0; k < N; ++k)
      G[k] += 4.0 * p.alpha * std::log1p(g.nodes[k] * g.nodes[k]) * v[k];
  if (p.beta != 0.0) {
    const RadialDensity rho = density_of(u);
    const PoissonField W = poisson_potential(rho);
    // -4 pi W plus the diagonal half-cell term is the exact derivative of
    // the prefix-rule interaction sum
    for (int k = 0; k < N; ++k)
      G[k] += p.beta *
              (8.0 * std::numbers::pi * W.values[k] +
               std::numbers::pi * h * h * 2.0 * std::log(g.nodes[k]) * rho.values[k]) *
              v[k];
  }
  if (p.gamma != 0.0)
    for (int k = 0; k < N; ++k)
      G[k] += 2.0 * p.gamma * (std::log(std::max(v[k] * v[k], kFloor)) + 1.0) * v[k];
  return G;
}

double el_residual(const WaveFunction& u, const SchrodingerParams& p) {
  return criticality(u, p).residual;
}

WaveFunction default_initial(double M, std::shared_ptr<const RadialGrid> grid) {
  if (!(M > 0.0)) throw std::invalid_argument("mass must be positive");
  const RadialGrid& g = *grid;
  std::vector<double> v(g.N);
  for (int i = 0; i < g.N; ++i)
    v[i] = std::sqrt(M * std::exp(-0.5 * g.nodes[i] * g.nodes[i]) / kTwoPi);
  return make_wave_function(std::move(grid), std::move(v), M, true);
}

GroundStateReport minimize(const SchrodingerParams& p, const MinimizeOptions& opts) {
  if (!(p.M > 0.0)) throw std::invalid_argument("minimize needs M > 0");
  if (!(opts.step > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("stopping threshold must be positive");
  if (opts.max_iters <= 0) throw std::invalid_argument("iteration cap must be positive");
  reject_outside_bounded(p, opts.allow_unknown);

  WaveFunction u = opts.init;
  if (u.values.empty())
    u = default_initial(p.M, std::make_shared<const RadialGrid>(
                                 make_radial_grid(512, 40.0, Grading::uniform)));
  require_uniform(*u.grid);
  renormalize(u, p.M);

  GroundStateReport rep;
  double E = schrodinger_energy(u, p);
  rep.trace.push_back(E);

  std::vector<double> prev_u, prev_grad;
  double step = opts.step;
  for (int it = 0; it < opts.max_iters; ++it) {
    Criticality c = criticality(u, p);
    if (c.residual < opts.tol) {
      rep.converged = true;
      break;
    }

    // BB1 step from the last accepted move; fall back on the configured step
    if (!prev_u.empty()) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < u.grid->N; ++i) {
        const double s = u.values[i] - prev_u[i];
        const double y = c.projected[i] - prev_grad[i];
        ss += u.grid->weights[i] * s * s;
        sy += u.grid->weights[i] * s * y;
      }
      step = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e3) : opts.step;
    }

    const double gn2 = dot(*u.grid, c.projected, c.projected);
    prev_u = u.values;
    prev_grad = c.projected;

    // Armijo backtracking on the renormalized trial keeps the trace monotone
    bool accepted = false;
    double t = step;
    for (int bt = 0; bt < 60; ++bt) {
      WaveFunction trial = u;
      for (int i = 0; i < u.grid->N; ++i) trial.values[i] -= t * c.projected[i];
      renormalize(trial, p.M);
      const double Et = schrodinger_energy(trial, p);
      if (Et <= E - 1e-4 * t * gn2) {
        u = std::move(trial);
        E = Et;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no descent direction left at this resolution
    rep.trace.push_back(E);
    rep.iterations = it + 1;
  }

  Criticality final_c = criticality(u, p);
  rep.residual = final_c.residual;
  rep.theta = final_c.theta;
  rep.converged = final_c.residual < opts.tol;
  rep.energy = E;
  rep.minimizer = std::move(u);
  return rep;
}

}  // namespace logfe
