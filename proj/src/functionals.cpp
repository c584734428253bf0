#include "logfe/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace logfe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDensityFloor = 1e-300;  // below this, rho log rho is 0
constexpr double kTailWarnTol = 1e-9;

// 2*pi * (core quadrature from the origin cut + analytic origin and tail
// moments). Entries of f below the cut index are ignored.
double radial_split(const RadialDensity& rho, const std::vector<double>& f,
                    const std::optional<PowerLogSeries>& origin_part,
                    const std::optional<PowerLogSeries>& tail_part) {
  double s = integrate_from(*rho.grid, f, rho.core_start());
  if (origin_part) s += origin_part->integral_origin(rho.origin_cut());
  if (tail_part) s += tail_part->integral_tail(rho.grid->R_max);
  return kTwoPi * s;
}

void warn_truncation(const char* fn, double est) {
  std::fprintf(stderr, "%s: ignoring ~%.3g beyond R_max (density has no tail model)\n", fn, est);
}

// number of terms of a log1p-type expansion in q needed for q^K/K < floor
int expansion_length(double q, double floor_val) {
  q = std::abs(q);
  if (q >= 0.999) throw std::domain_error("series argument too close to 1");
  double p = q;
  int K = 1;
  while (p / K > floor_val && K < 400) {
    p *= q;
    ++K;
  }
  return K;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// exact angular mean of log(1 + |x - x0|^2) over the circle |x| = s, |x0| = d:
// (1/2pi) int log(A - B cos t) dt = log((A + sqrt(A^2 - B^2)) / 2)
double translated_log_kernel(double s, double d) {
  const double A = 1.0 + s * s + d * d;
  const double sm = s - d, sp = s + d;
  const double disc = (1.0 + sm * sm) * (1.0 + sp * sp);  // = A^2 - B^2
  return std::log(0.5 * (A + std::sqrt(disc)));
}

struct PoissonParts {
  std::vector<double> P;  // int_0^{r_k} rho s ds
  std::vector<double> S;  // int_{r_k}^inf rho log(s) s ds
};

PoissonParts poisson_parts(const RadialDensity& rho) {
  const RadialGrid& g = *rho.grid;
  const int j0 = rho.core_start();

  std::vector<double> f_log(g.N, 0.0);
  for (int k = j0; k < g.N; ++k) f_log[k] = rho.values[k] * std::log(g.nodes[k]);

  std::vector<double> Pm = prefix_integrals_from(g, rho.values, j0);
  std::vector<double> Pl = prefix_integrals_from(g, f_log, j0);
  const double total_log = integrate_from(g, f_log, j0);

  double m0 = 0.0;
  PowerLogSeries A_o, OL;  // mass and log-weighted partial integrals near 0
  if (rho.origin) {
    m0 = rho.origin->integral_origin(rho.origin_cut());
    A_o = rho.origin->antiderivative_rdr();
    OL = (*rho.origin * PowerLogSeries::monomial(1.0, 0.0, 1)).antiderivative_rdr();
  }
  double tail_S = 0.0;
  if (rho.tail)
    tail_S = (*rho.tail * PowerLogSeries::monomial(1.0, 0.0, 1)).integral_tail(g.R_max);

  PoissonParts out;
  out.P.resize(g.N);
  out.S.resize(g.N);
  const double OL_cut = rho.origin ? OL.eval(rho.origin_cut()) : 0.0;
  for (int k = 0; k < g.N; ++k) {
    if (k >= j0) {
      out.P[k] = m0 + Pm[k];
      out.S[k] = (total_log - Pl[k]) + tail_S;
    } else {
      out.P[k] = A_o.eval(g.nodes[k]);
      out.S[k] = (OL_cut - OL.eval(g.nodes[k])) + total_log + tail_S;
    }
  }
  return out;
}

double cell_mean_log_origin() {
  // mean of log|x| over the unit square centered at the origin
  static const double c1 = [] {
    auto inner = [](double u) {
      double v = 0.5 * std::log(u * u + 0.25) - 1.0;
      if (u > 0.0) v += 2.0 * u * std::atan(1.0 / (2.0 * u));
      return v;
    };
    return 2.0 * simpson(inner, 0.0, 0.5, 200000);
  }();
  return c1;
}

}  // namespace

double entropy(const RadialDensity& rho, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("entropy needs M > 0");
  const RadialGrid& g = *rho.grid;
  const double logM = std::log(M);
  std::vector<double> f(g.N, 0.0);
  for (int k = rho.core_start(); k < g.N; ++k) {
    const double v = rho.values[k];
    if (v > kDensityFloor) f[k] = v * (std::log(v) - logM);
  }
  std::optional<PowerLogSeries> op, tp;
  if (rho.origin) {
    if (!rho.origin_log)
      throw std::invalid_argument("entropy needs the log descriptor of the origin model");
    op = *rho.origin * (*rho.origin_log + PowerLogSeries::constant(-logM));
  }
  if (rho.tail && !rho.tail->empty())
    tp = *rho.tail * (log_of_series_tail(*rho.tail, g.R_max) + PowerLogSeries::constant(-logM));
  return radial_split(rho, f, op, tp);
}

double entropy_raw(const RadialDensity& rho) { return entropy(rho, 1.0); }

double potential_moment(const RadialDensity& rho) {
  const RadialGrid& g = *rho.grid;
  std::vector<double> f(g.N, 0.0);
  for (int k = rho.core_start(); k < g.N; ++k)
    f[k] = rho.values[k] * std::log1p(g.nodes[k] * g.nodes[k]);

  std::optional<PowerLogSeries> op, tp;
  if (rho.origin) {
    const double cut = rho.origin_cut();
    const int K = expansion_length(cut * cut, 1e-17);
    op = *rho.origin * log1p_power_series(1.0, 2.0, K);
  }
  if (rho.tail) {
    PowerLogSeries lg = PowerLogSeries::monomial(2.0, 0.0, 1) + log1p_power_series(1.0, -2.0, 8);
    tp = *rho.tail * lg;
  } else {
    // if rho ~ rho(R)(R/s)^4 past the grid, the missing piece is about
    // 2 pi rho(R) R^2 (log R + 1/2)
    const double R = g.R_max;
    const double est = kTwoPi * rho.values.back() * R * R * (std::log(R) + 0.5);
    const double core = kTwoPi * integrate_from(g, f, rho.core_start());
    if (est > kTailWarnTol * (1.0 + std::abs(core))) warn_truncation("potential_moment", est);
  }
  return radial_split(rho, f, op, tp);
}

double potential_moment_translated(const RadialDensity& rho, double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("translation distance must be >= 0");
  if (d == 0.0) return potential_moment(rho);
  const RadialGrid& g = *rho.grid;
  std::vector<double> f(g.N, 0.0);
  for (int k = rho.core_start(); k < g.N; ++k)
    f[k] = rho.values[k] * translated_log_kernel(g.nodes[k], d);

  double s = integrate_from(g, f, rho.core_start());
  if (rho.origin) {
    // substitute s = cut e^-t; the kernel is bounded near zero
    const double cut = rho.origin_cut();
    const PowerLogSeries& o = *rho.origin;
    const double decay = o.leading_exponent() + 2.0;  // > 0
    const double T = 40.0 / std::min(decay, 2.0);
    auto integrand = [&o, cut, d](double t) {
      const double r = cut * std::exp(-t);
      return o.eval(r) * translated_log_kernel(r, d) * r * r;
    };
    s += simpson(integrand, 0.0, T, 20000);
  }
  if (rho.tail) {
    const PowerLogSeries& tl = *rho.tail;
    const double R = g.R_max;
    auto integrand = [&tl, R, d](double t) {
      const double r = R * std::exp(t);
      return tl.eval(r) * translated_log_kernel(r, d) * r * r;
    };
    s += simpson(integrand, 0.0, 120.0, 48000);
  }
  return kTwoPi * s;
}

double log_moment(const RadialDensity& rho) {
  const RadialGrid& g = *rho.grid;
  if (rho.core_start() == 0) {
    // a grid-scale spike at the first node makes int log|x| rho meaningless
    const double v0 = rho.values[0];
    const double v1 = rho.values.size() > 1 ? rho.values[1] : 0.0;
    if (v0 > 100.0 * (v1 + kDensityFloor) && kTwoPi * g.weights[0] * v0 > 1e-3 * rho.mass)
      throw std::runtime_error("log moment diverges: mass concentrates at the origin node");
  }
  std::vector<double> f(g.N, 0.0);
  for (int k = rho.core_start(); k < g.N; ++k)
    f[k] = rho.values[k] * 2.0 * std::log(g.nodes[k]);
  std::optional<PowerLogSeries> op, tp;
  const PowerLogSeries two_log = PowerLogSeries::monomial(2.0, 0.0, 1);
  if (rho.origin) op = *rho.origin * two_log;
  if (rho.tail) tp = *rho.tail * two_log;
  return radial_split(rho, f, op, tp);
}

double interaction(const RadialDensity& rho) {
  const RadialGrid& g = *rho.grid;
  const int j0 = rho.core_start();

  double m0 = 0.0;
  std::optional<PowerLogSeries> op;
  if (rho.origin) {
    m0 = rho.origin->integral_origin(rho.origin_cut());
    // m(s) = 2 pi int_0^s rho t dt exactly, as a series vanishing at 0
    PowerLogSeries m_series = rho.origin->antiderivative_rdr() * kTwoPi;
    op = *rho.origin * m_series * PowerLogSeries::monomial(2.0, 0.0, 1);
  }

  std::vector<double> Pm = prefix_integrals_from(g, rho.values, j0);
  std::vector<double> f(g.N, 0.0);
  for (int k = j0; k < g.N; ++k)
    f[k] = 2.0 * std::log(g.nodes[k]) * rho.values[k] * kTwoPi * (m0 + Pm[k]);

  std::optional<PowerLogSeries> tp;
  if (rho.tail) {
    // m(s) = M - 2 pi int_s^inf rho t dt = M + 2 pi A_t(s)
    PowerLogSeries m_tail = PowerLogSeries::constant(rho.mass) +
                            rho.tail->antiderivative_rdr() * kTwoPi;
    tp = *rho.tail * m_tail * PowerLogSeries::monomial(2.0, 0.0, 1);
  }
  return radial_split(rho, f, op, tp);
}

PoissonField poisson_potential(const RadialDensity& rho) {
  const RadialGrid& g = *rho.grid;
  PoissonParts parts = poisson_parts(rho);
  PoissonField W;
  W.grid = rho.grid;
  W.mass = rho.mass;
  W.values.resize(g.N);
  for (int k = 0; k < g.N; ++k)
    W.values[k] = -(std::log(g.nodes[k]) * parts.P[k] + parts.S[k]);
  return W;
}

double poisson_potential_at(const RadialDensity& rho, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("radius must be >= 0");
  const RadialGrid& g = *rho.grid;
  if (r >= g.R_max) {
    double T = 0.0, S = 0.0;
    if (rho.tail) {
      T = rho.tail->integral_tail(r);
      S = (*rho.tail * PowerLogSeries::monomial(1.0, 0.0, 1)).integral_tail(r);
    }
    const double P = rho.mass / kTwoPi - T;
    return -(std::log(r) * P + S);
  }
  PoissonField W = poisson_potential(rho);
  if (r <= g.nodes[0]) return W.values[0];
  const int i = g.index_at_or_above(r);
  const double t = (r - g.nodes[i - 1]) / (g.nodes[i] - g.nodes[i - 1]);
  return (1.0 - t) * W.values[i - 1] + t * W.values[i];
}

double kinetic(const WaveFunction& u) {
  const RadialGrid& g = *u.grid;
  const int N = g.N;
  const std::vector<double>& v = u.values;

  if (g.grading == Grading::uniform) {
    // face-based form; matches the discrete energies of the descent solvers
    double s = 0.0;
    for (int i = 0; i + 1 < N; ++i) {
      const double du = v[i + 1] - v[i];
      s += du * du * double(i + 1);  // (du/h)^2 * r_face * h with r_face = (i+1) h
    }
    return kTwoPi * s;
  }

  // 4th-order derivative in the grading coordinate xi, then (du/dr)^2
  std::vector<double> f(N);
  const double inv12 = 1.0 / (12.0 * g.dxi);
  for (int i = 0; i < N; ++i) {
    double uxi;
    if (i >= 2 && i + 2 < N) {
      uxi = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * inv12;
    } else if (i == 0) {
      uxi = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * inv12;
    } else if (i == 1) {
      uxi = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * inv12;
    } else if (i == N - 2) {
      uxi = -(-3.0 * v[N - 1] - 10.0 * v[N - 2] + 18.0 * v[N - 3] - 6.0 * v[N - 4] + v[N - 5]) *
            inv12;
    } else {
      uxi = -(-25.0 * v[N - 1] + 48.0 * v[N - 2] - 36.0 * v[N - 3] + 16.0 * v[N - 4] -
              3.0 * v[N - 5]) *
            inv12;
    }
    const double rp = g.jac[i] / g.nodes[i];  // dr/dxi
    const double ur = uxi / rp;
    f[i] = ur * ur;
  }
  return kTwoPi * integrate(g, f);
}

double free_energy(const RadialDensity& rho, const FreeEnergyParams& p) {
  if (!(p.M > 0.0)) throw std::invalid_argument("free energy needs M > 0");
  double F = p.c * entropy(rho, p.M);
  if (p.a != 0.0) F += p.a * potential_moment(rho);
  if (p.b != 0.0) F -= p.b / p.M * interaction(rho);
  return F;
}

double g_functional(const RadialDensity& rho, double a) {
  const double M = rho.mass;
  return entropy(rho, M) + a * log_moment(rho) + 2.0 * (1.0 - a) * interaction(rho) / M;
}

double j_functional(const RadialDensity& rho, double eta) {
  return entropy(rho, rho.mass) + eta * potential_moment(rho);
}

double schrodinger_energy(const WaveFunction& u, const SchrodingerParams& p,
                          const RadialDensity& rho) {
  if (rho.grid != u.grid &&
      (rho.grid->N != u.grid->N || rho.grid->R_max != u.grid->R_max ||
       rho.grid->grading != u.grid->grading))
    throw std::invalid_argument("wave function and density live on different grids");
  if (std::abs(rho.mass - u.mass) > 1e-9 * u.mass)
    throw std::invalid_argument("wave function and density masses disagree");
  double E = kinetic(u);
  if (p.alpha != 0.0) E += 2.0 * p.alpha * potential_moment(rho);
  if (p.beta != 0.0) E -= p.beta * interaction(rho);
  if (p.gamma != 0.0) E += p.gamma * entropy_raw(rho);
  return E;
}

double schrodinger_energy(const WaveFunction& u, const SchrodingerParams& p) {
  return schrodinger_energy(u, p, density_of(u));
}

double entropy(const PlanarDensity& rho, double M) {
  if (!(M > 0.0)) throw std::invalid_argument("entropy needs M > 0");
  const double logM = std::log(M);
  double s = 0.0;
  for (double v : rho.values)
    if (v > kDensityFloor) s += v * (std::log(v) - logM);
  return s * rho.grid.h * rho.grid.h;
}

double potential_moment(const PlanarDensity& rho) {
  const PlanarGrid& g = rho.grid;
  double s = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    const double y = g.centers[iy];
    for (int ix = 0; ix < g.n; ++ix) {
      const double x = g.centers[ix];
      s += rho.values[std::size_t(iy) * g.n + ix] * std::log1p(x * x + y * y);
    }
  }
  return s * g.h * g.h;
}

double log_moment(const PlanarDensity& rho) {
  const PlanarGrid& g = rho.grid;
  double s = 0.0;
  for (int iy = 0; iy < g.n; ++iy) {
    const double y = g.centers[iy];
    for (int ix = 0; ix < g.n; ++ix) {
      const double x = g.centers[ix];
      const double r = std::hypot(x, y);
      const double v = rho.values[std::size_t(iy) * g.n + ix];
      if (r < 0.5 * g.h) {
        // the cell straddles the origin: use the exact cell average of log|x|
        s += v * (std::log(g.h) + cell_mean_log_origin());
      } else {
        s += v * std::log(r);
      }
    }
  }
  return 2.0 * s * g.h * g.h;
}

double planar_self_cell_constant() {
  // c0 = int int over unit-square pairs of log|x - y|; per coordinate the
  // difference is triangular, so c0 = 2 int_0^1 (1-u)(A(u) - B(u)) du with
  // A, B the closed-form inner integrals.
  static const double c0 = [] {
    auto f = [](double u) {
      const double u2 = u * u;
      double A = std::log(u2 + 1.0) - 2.0;
      if (u > 0.0) A += 2.0 * u * std::atan(1.0 / u);
      double B = 0.5 * ((u2 + 1.0) * std::log(u2 + 1.0) - 1.0);
      if (u > 0.0) B -= 0.5 * u2 * std::log(u2);
      return (1.0 - u) * (A - B);
    };
    return 2.0 * simpson(f, 0.0, 1.0, 400000);
  }();
  return c0;
}

double interaction_planar(const PlanarDensity& rho) {
  const PlanarGrid& g = rho.grid;
  const int n = g.n;
  const double nd = double(n);
  if (nd * nd * nd * nd > 4.5e12)
    throw std::invalid_argument("planar interaction: pair sum beyond the tractable cap");

  const double h = g.h;
  const double logh = std::log(h);
  const std::vector<double>& v = rho.values;

  std::vector<double> rowmax(n, 0.0);
  for (int iy = 0; iy < n; ++iy) {
    double m = 0.0;
    for (int ix = 0; ix < n; ++ix) m = std::max(m, v[std::size_t(iy) * n + ix]);
    rowmax[iy] = m;
  }

  double off = 0.0;  // unordered pair sum of v_c v_c' log|x_c - x_c'|
  std::vector<double> acc(n);
  for (int dy = 0; dy < n; ++dy) {
    std::fill(acc.begin(), acc.end(), 0.0);
    bool any = false;
    for (int iy = 0; iy + dy < n; ++iy) {
      if (rowmax[iy] == 0.0 || rowmax[iy + dy] == 0.0) continue;
      any = true;
      const double* a = &v[std::size_t(iy) * n];
      const double* b = &v[std::size_t(iy + dy) * n];
      if (dy == 0) {
        for (int d = 1; d < n; ++d) {
          double s = 0.0;
          for (int ix = 0; ix + d < n; ++ix) s += a[ix] * b[ix + d];
          acc[d] += s;
        }
      } else {
        {
          double s = 0.0;
          for (int ix = 0; ix < n; ++ix) s += a[ix] * b[ix];
          acc[0] += s;
        }
        for (int d = 1; d < n; ++d) {
          double s = 0.0;
          for (int ix = 0; ix + d < n; ++ix) s += a[ix] * b[ix + d] + b[ix] * a[ix + d];
          acc[d] += s;
        }
      }
    }
    if (!any) continue;
    for (int d = (dy == 0 ? 1 : 0); d < n; ++d) {
      if (acc[d] == 0.0) continue;
      off += acc[d] * (logh + 0.5 * std::log(double(d) * d + double(dy) * dy));
    }
  }

  double self = 0.0;
  for (double x : v) self += x * x;
  self *= logh + planar_self_cell_constant();

  const double h4 = h * h * h * h;
  return h4 * (2.0 * off + self);
}

}  // namespace logfe
