#include "logfe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace logfe {

namespace {

// Gregory order-6 boundary weights; interior weight is 1. Exact through
// degree-5 polynomials on a uniform grid.
constexpr double kGregory[5] = {95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0, 793.0 / 720.0,
                                157.0 / 160.0};

constexpr double kDefaultKappa = 18.0;

void check_f(const RadialGrid& g, const std::vector<double>& f) {
  if (int(f.size()) != g.N) throw std::invalid_argument("value count does not match grid");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in integrand");
}

}  // namespace

int RadialGrid::index_at_or_above(double r) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
  return int(it - nodes.begin());
}

RadialGrid make_radial_grid(int N, double R_max, Grading grading) {
  if (N < 16) throw std::invalid_argument("grid needs at least 16 nodes");
  if (!(R_max > 0.0)) throw std::invalid_argument("R_max must be positive");

  RadialGrid g;
  g.N = N;
  g.R_max = R_max;
  g.grading = grading;
  g.nodes.resize(N);
  g.weights.resize(N);

  if (grading == Grading::uniform) {
    // midpoint cells: integrates r dr exactly
    const double h = R_max / N;
    for (int i = 0; i < N; ++i) {
      g.nodes[i] = (i + 0.5) * h;
      g.weights[i] = g.nodes[i] * h;
    }
    return g;
  }

  g.kappa = kDefaultKappa;
  g.dxi = 1.0 / N;
  g.jac.resize(N);
  const double em1 = std::expm1(g.kappa);
  for (int j = 1; j <= N; ++j) {
    const double xi = double(j) / N;
    const double e = std::exp(g.kappa * xi);
    const double r = R_max * (e - 1.0) / em1;
    const double dr = R_max * g.kappa * e / em1;
    // stored index j-1; the xi=0 node carries zero measure and is dropped
    g.nodes[j - 1] = r;
    g.jac[j - 1] = r * dr;
    double c = 1.0;  // Gregory factor for xi index j in the rule over 0..N
    if (j < 5) c = kGregory[j];
    if (N - j < 5) c = kGregory[N - j];
    g.weights[j - 1] = g.dxi * c * g.jac[j - 1];
  }
  for (int i = 0; i + 1 < N; ++i)
    if (!(g.nodes[i] < g.nodes[i + 1])) throw std::runtime_error("grid nodes not increasing");
  return g;
}

double integrate(const RadialGrid& g, const std::vector<double>& f) {
  check_f(g, f);
  double s = 0.0;
  for (int i = 0; i < g.N; ++i) s += g.weights[i] * f[i];
  return s;
}

double integrate_from(const RadialGrid& g, const std::vector<double>& f, int j0) {
  check_f(g, f);
  if (j0 <= 0) return integrate(g, f);
  if (j0 >= g.N) return 0.0;

  if (g.grading == Grading::uniform) {
    // whole cells above j0 plus the upper half of cell j0
    const double h = g.R_max / g.N;
    double s = 0.0;
    for (int i = j0 + 1; i < g.N; ++i) s += g.weights[i] * f[i];
    s += f[j0] * 0.5 * h * (g.nodes[j0] + 0.25 * h);
    return s;
  }

  // fresh Gregory rule over xi indices j0+1 .. N (stored j0 .. N-1)
  const int len = g.N - j0;
  double s = 0.0;
  if (len >= 12) {
    for (int i = j0; i < g.N; ++i) s += f[i] * g.jac[i];
    for (int d = 0; d < 5; ++d) {
      s += (kGregory[d] - 1.0) * f[j0 + d] * g.jac[j0 + d];
      s += (kGregory[d] - 1.0) * f[g.N - 1 - d] * g.jac[g.N - 1 - d];
    }
  } else {
    s += 0.5 * f[j0] * g.jac[j0];
    for (int i = j0 + 1; i < g.N - 1; ++i) s += f[i] * g.jac[i];
    s += 0.5 * f[g.N - 1] * g.jac[g.N - 1];
  }
  return s * g.dxi;
}

std::vector<double> prefix_integrals(const RadialGrid& g, const std::vector<double>& f) {
  check_f(g, f);
  std::vector<double> P(g.N);

  if (g.grading == Grading::uniform) {
    const double h = g.R_max / g.N;
    double run = 0.0;  // whole cells strictly below node i
    for (int i = 0; i < g.N; ++i) {
      P[i] = run + f[i] * 0.5 * h * (g.nodes[i] - 0.25 * h);
      run += g.weights[i] * f[i];
    }
    return P;
  }

  // trapezoid prefix in xi with Gregory corrections. The rule for
  // int_0^{xi_n} covers xi indices 0..n with left factors g_d at index d
  // and right factors g_d at index n-d; F(0) = 0, stored index i = xi
  // index i+1.
  double run = 0.0;
  for (int i = 0; i < g.N; ++i) {
    run += f[i] * g.jac[i];
    double s = run;
    if (i >= 8) {  // xi index n = i+1 >= 9: correction stencils disjoint
      for (int d = 1; d < 5; ++d) s += (kGregory[d] - 1.0) * f[d - 1] * g.jac[d - 1];
      for (int d = 0; d < 5; ++d) s += (kGregory[d] - 1.0) * f[i - d] * g.jac[i - d];
    } else {
      s -= 0.5 * f[i] * g.jac[i];  // plain trapezoid with F(0) = 0
    }
    P[i] = s * g.dxi;
  }
  return P;
}

std::vector<double> prefix_integrals_from(const RadialGrid& g, const std::vector<double>& f,
                                          int j0) {
  check_f(g, f);
  if (j0 <= 0) return prefix_integrals(g, f);
  if (j0 >= g.N) throw std::invalid_argument("prefix start beyond grid");
  std::vector<double> P(g.N, 0.0);

  if (g.grading == Grading::uniform) {
    const double h = g.R_max / g.N;
    double run = f[j0] * 0.5 * h * (g.nodes[j0] + 0.25 * h);  // upper half of cell j0
    for (int i = j0 + 1; i < g.N; ++i) {
      P[i] = run + f[i] * 0.5 * h * (g.nodes[i] - 0.25 * h);
      run += g.weights[i] * f[i];
    }
    return P;
  }

  // trapezoid in xi from stored index j0, Gregory-corrected at both ends
  // once the stencils (j0..j0+4 and i-4..i) are disjoint
  double run = f[j0] * g.jac[j0];
  for (int i = j0 + 1; i < g.N; ++i) {
    run += f[i] * g.jac[i];
    double s = run;
    if (i - j0 >= 9) {
      for (int d = 0; d < 5; ++d) {
        s += (kGregory[d] - 1.0) * f[j0 + d] * g.jac[j0 + d];
        s += (kGregory[d] - 1.0) * f[i - d] * g.jac[i - d];
      }
    } else {
      s -= 0.5 * (f[j0] * g.jac[j0] + f[i] * g.jac[i]);
    }
    P[i] = s * g.dxi;
  }
  return P;
}

PlanarGrid make_planar_grid(double h, double L) {
  if (!(h > 0.0) || !(L > 0.0)) throw std::invalid_argument("planar grid needs h > 0, L > 0");
  PlanarGrid g;
  g.h = h;
  g.n = int(std::lround(2.0 * L / h));
  if (g.n < 2) throw std::invalid_argument("planar grid too coarse");
  g.L = 0.5 * g.n * h;  // snap so the grid tiles [-L, L]^2 exactly
  g.centers.resize(g.n);
  for (int i = 0; i < g.n; ++i) g.centers[i] = -g.L + (i + 0.5) * h;
  return g;
}

}  // namespace logfe
