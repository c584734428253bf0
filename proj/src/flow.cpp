#include "logfe/flow.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace logfe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;
constexpr double kCflSafety = 0.25;
constexpr double kLyapunovSlack = 1e-8;

// B(w) = w / (e^w - 1); B(-w) = B(w) + w
double bernoulli(double w) {
  if (std::abs(w) < 1e-5) return 1.0 - 0.5 * w + w * w / 12.0;
  return w / std::expm1(w);
}

void require_uniform(const RadialGrid& g) {
  if (g.grading != Grading::uniform)
    throw std::invalid_argument(
        "the flow solver needs a uniform grid: fluxes live on equidistant faces");
}

// Phi = a log(1+r^2) + (4 pi b / M) W at the cell centers
std::vector<double> potential_nodes(const RadialDensity& rho, const FreeEnergyParams& p) {
  const RadialGrid& g = *rho.grid;
  std::vector<double> phi(g.N);
  for (int i = 0; i < g.N; ++i) phi[i] = p.a * std::log1p(g.nodes[i] * g.nodes[i]);
  if (p.b != 0.0) {
    const PoissonField W = poisson_potential(rho);
    const double c = 4.0 * kPi * p.b / p.M;
    for (int i = 0; i < g.N; ++i) phi[i] += c * W.values[i];
  }
  return phi;
}

void check_config(const FlowConfig& cfg) {
  if (!cfg.grid) throw std::invalid_argument("flow config needs a grid");
  require_uniform(*cfg.grid);
  const double h = cfg.grid->R_max / cfg.grid->N;
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.dt > kCflSafety * h * h * (1.0 + 1e-12))
    throw std::invalid_argument("dt exceeds the stability bound 0.25 h^2");
  if (cfg.steps < 0) throw std::invalid_argument("step count must be nonnegative");
  if (!(cfg.params.M > 0.0)) throw std::invalid_argument("flow needs M > 0");
}

FlowSample sample_of(const FlowState& st, const FlowConfig& cfg) {
  FlowSample s;
  s.time = st.time;
  s.free_energy = free_energy(st.density, cfg.params);
  s.dissipation = dissipation(st.density, cfg.params);
  s.mass = quadrature_mass(st.density);
  return s;
}

}  // namespace

std::vector<double> drift_field(const RadialDensity& rho, const FreeEnergyParams& p) {
  require_uniform(*rho.grid);
  const RadialGrid& g = *rho.grid;
  const double h = g.R_max / g.N;
  const std::vector<double> phi = potential_nodes(rho, p);
  std::vector<double> G(g.N + 1, 0.0);
  for (int i = 1; i < g.N; ++i) {
    const double lo = std::max(rho.values[i - 1], kFloor);
    const double hi = std::max(rho.values[i], kFloor);
    G[i] = (std::log(hi / lo) + phi[i] - phi[i - 1]) / h;
  }
  return G;
}

double dissipation(const RadialDensity& rho, const FreeEnergyParams& p) {
  const RadialGrid& g = *rho.grid;
  const double h = g.R_max / g.N;
  const std::vector<double> G = drift_field(rho, p);
  double D = 0.0;
  for (int i = 1; i < g.N; ++i) {
    const double x = std::max(rho.values[i - 1], kFloor);
    const double y = std::max(rho.values[i], kFloor);
    const double lm = x == y ? x : (x - y) / std::log(x / y);
    D += double(i) * lm * G[i] * G[i];
  }
  return 2.0 * kPi * h * h * D;
}

FlowState flow_init(const FlowConfig& cfg, const RadialDensity& initial) {
  check_config(cfg);
  if (!initial.grid || initial.grid->N != cfg.grid->N ||
      initial.grid->R_max != cfg.grid->R_max ||
      initial.grid->grading != Grading::uniform)
    throw std::invalid_argument("initial density must live on the flow grid");
  if (std::abs(initial.mass - cfg.params.M) > 1e-9 * std::max(1.0, cfg.params.M))
    throw std::invalid_argument("initial mass must match the functional mass");

  FlowState st;
  st.density.grid = cfg.grid;
  st.density.values = initial.values;
  st.density.mass = initial.mass;
  // the walls are no-flux, so the exterior is exactly empty: an explicit zero
  // tail replaces whatever model the initial density carried
  st.density.tail = PowerLogSeries{};
  for (double& v : st.density.values) v = std::max(v, kFloor);
  st.history.push_back(sample_of(st, cfg));
  return st;
}

FlowState flow_step(FlowState st, const FlowConfig& cfg) {
  check_config(cfg);
  if (st.history.empty() || !st.density.grid || st.density.grid->N != cfg.grid->N ||
      st.density.grid->R_max != cfg.grid->R_max)
    throw std::invalid_argument("flow state does not match the configuration");

  const RadialGrid& g = *st.density.grid;
  const int N = g.N;
  const double h = g.R_max / N;
  std::vector<double>& v = st.density.values;

  const std::vector<double> phi = potential_nodes(st.density, cfg.params);
  std::vector<double> J(N + 1, 0.0);
  for (int i = 1; i < N; ++i) {
    const double d = phi[i] - phi[i - 1];
    const double B = bernoulli(d);
    J[i] = (B * v[i - 1] - (B + d) * v[i]) / h;
  }
  for (int i = 0; i < N; ++i) {
    v[i] += cfg.dt * (double(i) * J[i] - double(i + 1) * J[i + 1]) / g.nodes[i];
    if (v[i] < kFloor) v[i] = kFloor;
  }
  st.time += cfg.dt;

  const double F_prev = st.history.back().free_energy;
  FlowSample s = sample_of(st, cfg);
  if (s.free_energy > F_prev + kLyapunovSlack) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "flow unstable at t = %.6g: F rose from %.12g to %.12g; reduce dt",
                  st.time, F_prev, s.free_energy);
    throw std::runtime_error(buf);
  }
  if (cfg.stop > 0.0 && std::abs(s.free_energy - F_prev) /
                                (cfg.dt * std::max(1.0, std::abs(s.free_energy))) <
                            cfg.stop)
    st.steady = true;
  st.history.push_back(std::move(s));
  return st;
}

FlowState flow_run(const FlowConfig& cfg, const RadialDensity& initial) {
  FlowState st = flow_init(cfg, initial);
  for (long k = 0; k < cfg.steps && !st.steady; ++k) st = flow_step(std::move(st), cfg);
  return st;
}

}  // namespace logfe
