#include "logfe/closedforms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace logfe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double bump_raw(double r, double lo, double hi) {
  if (r <= lo || r >= hi) return 0.0;
  return std::exp(-1.0 / ((r - lo) * (hi - r)));
}

// 2*pi*int bump r dr; the integrand vanishes to all orders at both ends, so
// plain midpoint superconverges
double bump_norm(double lo, double hi) {
  const int n = 20000;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = lo + (i + 0.5) * h;
    s += bump_raw(r, lo, hi) * r;
  }
  return kTwoPi * s * h;
}

double annulus_norm() {
  static const double v = bump_norm(1.0, 2.0);
  return v;
}

double ball_norm() {
  static const double v = bump_norm(0.0, 1.0);
  return v;
}

void check_params(const ClosedFormFamily& f) {
  if (!(f.M > 0.0)) throw std::invalid_argument("family mass must be positive");
  if (f.kind == FamilyKind::rho_eta && !(f.eta > 1.0))
    throw std::invalid_argument("rho_eta needs eta > 1: the entropy-potential functional is unbounded below otherwise");
  if (f.kind == FamilyKind::k_minimizer) {
    if (!(f.a >= 0.0 && f.a < 1.0)) throw std::invalid_argument("k_minimizer needs 0 <= a < 1");
    if (!(f.lambda > 0.0)) throw std::invalid_argument("k_minimizer needs lambda > 0");
  }
}

int series_len(double q, double floor = 1e-16) {
  int K = 4;
  while (K < 300 && (K + 1) * std::pow(q, K) > floor) ++K;
  return K;
}

}  // namespace

ClosedFormFamily ClosedFormFamily::parse(const std::string& spec) {
  ClosedFormFamily f;
  std::string head = spec, args;
  if (auto p = spec.find(':'); p != std::string::npos) {
    head = spec.substr(0, p);
    args = spec.substr(p + 1);
  }
  if (head == "rho-star") f.kind = FamilyKind::rho_star;
  else if (head == "rho-eta") f.kind = FamilyKind::rho_eta;
  else if (head == "k-minimizer") f.kind = FamilyKind::k_minimizer;
  else if (head == "gaussian") f.kind = FamilyKind::gaussian;
  else if (head == "annulus-bump") f.kind = FamilyKind::annulus_bump;
  else if (head == "unit-ball-bump") f.kind = FamilyKind::unit_ball_bump;
  else throw std::invalid_argument("unknown density family '" + head + "'");

  std::stringstream ss(args);
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad family parameter '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const double val = std::stod(kv.substr(eq + 1));
    if (key == "eta") f.eta = val;
    else if (key == "a") f.a = val;
    else if (key == "lambda") f.lambda = val;
    else if (key == "M") f.M = val;
    else throw std::invalid_argument("unknown family parameter '" + key + "'");
  }
  check_params(f);
  return f;
}

std::string ClosedFormFamily::name() const {
  switch (kind) {
    case FamilyKind::rho_star: return "rho-star";
    case FamilyKind::rho_eta: return "rho-eta";
    case FamilyKind::k_minimizer: return "k-minimizer";
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::annulus_bump: return "annulus-bump";
    case FamilyKind::unit_ball_bump: return "unit-ball-bump";
  }
  return "?";
}

double evaluate(const ClosedFormFamily& f, double r) {
  check_params(f);
  switch (f.kind) {
    case FamilyKind::rho_star: {
      const double d = 1.0 + r * r;
      return f.M / (kPi * d * d);
    }
    case FamilyKind::rho_eta:
      return f.M * (f.eta - 1.0) / kPi * std::pow(1.0 + r * r, -f.eta);
    case FamilyKind::k_minimizer: {
      if (r == 0.0)
        return f.a > 0.0 ? std::numeric_limits<double>::infinity()
                         : f.M / (kPi * f.lambda * f.lambda);
      const double lam2 = f.lambda * f.lambda;
      const double V = std::pow(r, 2.0 - 2.0 * f.a);
      const double d = lam2 + V;
      return f.M * (1.0 - f.a) / kPi * lam2 / (std::pow(r, 2.0 * f.a) * d * d);
    }
    case FamilyKind::gaussian:
      return f.M / kTwoPi * std::exp(-0.5 * r * r);
    case FamilyKind::annulus_bump:
      return f.M * bump_raw(r, 1.0, 2.0) / annulus_norm();
    case FamilyKind::unit_ball_bump:
      return f.M * bump_raw(r, 0.0, 1.0) / ball_norm();
  }
  throw std::logic_error("unreachable");
}

double support_radius(const ClosedFormFamily& f) {
  check_params(f);
  const double frac = 0.005;  // tail mass fraction defining the support
  switch (f.kind) {
    case FamilyKind::rho_star:
      return std::sqrt(1.0 / frac - 1.0);
    case FamilyKind::rho_eta:
      return std::sqrt(std::pow(frac, -1.0 / (f.eta - 1.0)) - 1.0);
    case FamilyKind::k_minimizer:
      // tail mass lam^2/(lam^2+V)
      return std::pow(f.lambda * f.lambda * (1.0 - frac) / frac, 1.0 / (2.0 - 2.0 * f.a));
    case FamilyKind::gaussian:
      return std::sqrt(-2.0 * std::log(frac));
    case FamilyKind::annulus_bump:
      return 2.0;
    case FamilyKind::unit_ball_bump:
      return 1.0;
  }
  throw std::logic_error("unreachable");
}

double min_grid_radius(const ClosedFormFamily& f) {
  if (f.kind != FamilyKind::k_minimizer) return 10.0;
  // tail series converges where lam^2 r^{-(2-2a)} <= 0.6
  return std::pow(f.lambda * f.lambda / 0.6, 1.0 / (2.0 - 2.0 * f.a));
}

RadialDensity discretize(const ClosedFormFamily& fam, std::shared_ptr<const RadialGrid> grid) {
  check_params(fam);
  if (!grid) throw std::invalid_argument("discretize needs a grid");
  const ClosedFormFamily f = fam;

  std::vector<double> vals(grid->N);
  for (int i = 0; i < grid->N; ++i) vals[i] = evaluate(f, grid->nodes[i]);

  std::optional<PowerLogSeries> tail, origin, origin_log;
  int j0 = 0;
  const double R = grid->R_max;

  switch (f.kind) {
    case FamilyKind::rho_star:
      tail = inv_square_power_series(1.0, -2.0, 5) * PowerLogSeries::monomial(f.M / kPi, -4.0);
      break;
    case FamilyKind::rho_eta:
      tail = binomial_power_series(-f.eta, 1.0, -2.0, 6) *
             PowerLogSeries::monomial(f.M * (f.eta - 1.0) / kPi, -2.0 * f.eta);
      break;
    case FamilyKind::k_minimizer: {
      const double lam2 = f.lambda * f.lambda;
      const double e = 2.0 - 2.0 * f.a;
      const double qt = lam2 * std::pow(R, -e);
      if (qt > 0.6)
        throw std::invalid_argument("grid R_max too small for this family's tail series");
      tail = inv_square_power_series(lam2, -e, series_len(qt)) *
             PowerLogSeries::monomial(f.M * (1.0 - f.a) * lam2 / kPi, 2.0 * f.a - 4.0);

      if (grid->grading == Grading::geometric) {
        const double r_cut = std::min(0.5, std::pow(0.3 * lam2, 1.0 / e));
        int idx = grid->index_at_or_above(r_cut);
        j0 = idx - 1;
        if (j0 >= 10) {
          const double q0 = std::pow(grid->nodes[j0], e) / lam2;
          const int K = series_len(q0);
          const double c = f.M * (1.0 - f.a) / (kPi * lam2);
          origin = inv_square_power_series(1.0 / lam2, e, K) *
                   PowerLogSeries::monomial(c, -2.0 * f.a);
          origin_log = PowerLogSeries::constant(std::log(c));
          origin_log->add_term(-2.0 * f.a, 0.0, 1);
          *origin_log += log1p_power_series(1.0 / lam2, e, K) * (-2.0);
        } else {
          j0 = 0;  // singularity too close to the first node; grid resolves it
          if (f.a > 0.45)
            throw std::invalid_argument("grid cannot resolve the origin singularity for these parameters");
        }
      } else if (f.a > 0.0) {
        throw std::invalid_argument("singular families need a geometric grid");
      }
      break;
    }
    case FamilyKind::gaussian:
    case FamilyKind::annulus_bump:
    case FamilyKind::unit_ball_bump:
      break;  // compactly supported or beyond-exponential decay
  }

  auto ev = [f](double r) { return evaluate(f, r); };
  return make_radial_density(std::move(grid), std::move(vals), f.M, std::move(tail),
                             std::move(origin), std::move(origin_log), j0, ev,
                             /*renormalize=*/true);
}

double analytic_value(const std::string& q, const std::map<std::string, double>& params) {
  auto get = [&params, &q](const std::string& key, double dflt = std::numeric_limits<double>::quiet_NaN()) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (std::isnan(dflt)) throw std::invalid_argument("analytic_value '" + q + "' needs parameter '" + key + "'");
    return dflt;
  };
  const double M = params.count("M") ? params.at("M") : 1.0;

  if (q == "mass") return M;
  if (q == "entropy.rho_eta") {
    const double eta = get("eta");
    if (!(eta > 1.0)) throw std::invalid_argument("entropy.rho_eta needs eta > 1");
    return M * (std::log((eta - 1.0) / kPi) - eta / (eta - 1.0));
  }
  if (q == "potential_moment.rho_eta") {
    const double eta = get("eta");
    if (!(eta > 1.0)) throw std::invalid_argument("potential_moment.rho_eta needs eta > 1");
    return M / (eta - 1.0);
  }
  if (q == "entropy.gaussian") return -M * (1.0 + std::log(kTwoPi));
  if (q == "interaction.gaussian") return M * M * (std::log(2.0) - 0.5 * std::numbers::egamma);
  if (q == "interaction.rho_star") return 0.5 * M * M;
  if (q == "kinetic.sqrt_gaussian") return 0.5 * M;
  if (q == "kinetic.sqrt_rho_star") return 2.0 * M / 3.0;
  if (q == "log_moment.rho_star") return 0.0;
  if (q == "j_min") {
    const double eta = get("eta");
    if (!(eta > 1.0)) throw std::invalid_argument("j_min needs eta > 1");
    return M * std::log((eta - 1.0) / kPi);
  }
  if (q == "K") {
    const double a = get("a");
    if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("K(a) needs 0 <= a < 1");
    return -std::log(std::numbers::e * kPi / (1.0 - a));
  }
  if (q == "loghls_constant") return -M * (1.0 + std::log(kPi));
  if (q == "C") {
    const double a = get("a"), b = get("b");
    const bool sharp_upper = std::abs(b - (2.0 * a - 2.0)) < 1e-12 && a >= 0.0 && a < 1.0;
    const bool sharp_lower = std::abs(b - (a - 2.0)) < 1e-12 && a >= 0.0;
    if (sharp_upper) return -std::log(std::numbers::e * kPi / (1.0 - a));
    if (sharp_lower) return 0.5 * a - 1.0 - std::log(kPi);
    throw std::invalid_argument("no closed-form constant is known at this (a, b)");
  }
  throw std::invalid_argument("unknown analytic quantity '" + q + "'");
}

RadialDensity radial_substitution(const RadialDensity& rho, double a) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("radial_substitution needs 0 <= a < 1");
  const RadialGrid& g = *rho.grid;
  const double beta = 1.0 / (1.0 - a);

  auto base_at = [&rho, &g](double t) {
    if (rho.evaluator) return rho.evaluator(t);
    if (t >= g.R_max) return rho.tail ? std::max(0.0, rho.tail->eval(t)) : 0.0;
    int i = g.index_at_or_above(t);
    if (i <= 0) return rho.values[0];
    const double w = (t - g.nodes[i - 1]) / (g.nodes[i] - g.nodes[i - 1]);
    return (1.0 - w) * rho.values[i - 1] + w * rho.values[i];
  };

  auto grid2 = std::make_shared<RadialGrid>(
      make_radial_grid(g.N, std::pow(g.R_max, 1.0 - a), g.grading));
  std::vector<double> vals(grid2->N);
  for (int i = 0; i < grid2->N; ++i) {
    const double s = grid2->nodes[i];
    const double t = std::pow(s, beta);
    vals[i] = std::pow(t, 2.0 * a) * base_at(t);
  }

  std::optional<PowerLogSeries> tail, origin, origin_log;
  int j0 = 0;
  if (rho.tail)
    tail = rho.tail->with_power_argument(beta) *
           PowerLogSeries::monomial(1.0, 2.0 * a * beta);
  if (rho.origin) {
    const double s_cut = std::pow(rho.origin_cut(), 1.0 - a);
    int idx = grid2->index_at_or_above(s_cut);
    j0 = std::max(0, idx - 1);
    if (j0 >= 10) {
      origin = rho.origin->with_power_argument(beta) *
               PowerLogSeries::monomial(1.0, 2.0 * a * beta);
      if (rho.origin_log) {
        origin_log = rho.origin_log->with_power_argument(beta);
        if (a != 0.0) origin_log->add_term(2.0 * a * beta, 0.0, 1);
        origin_log = PowerLogSeries(origin_log->terms());
      }
    } else {
      j0 = 0;
    }
  }

  std::function<double(double)> ev;
  if (rho.evaluator) {
    auto base = rho.evaluator;
    ev = [base, beta, a](double s) {
      const double t = std::pow(s, beta);
      return std::pow(t, 2.0 * a) * base(t);
    };
  }
  return make_radial_density(std::move(grid2), std::move(vals), (1.0 - a) * rho.mass,
                             std::move(tail), std::move(origin), std::move(origin_log), j0,
                             std::move(ev), /*renormalize=*/false, /*tol=*/1e-3);
}

}  // namespace logfe
