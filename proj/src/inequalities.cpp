#include "logfe/inequalities.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace logfe {
namespace {

constexpr double kPi = std::numbers::pi;

// Comparisons against the theorem boundaries tolerate this much drift, so
// scan grids built by repeated addition still land exactly on the lines.
bool near(double x, double y) {
  return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)});
}
bool le(double x, double y) { return x < y || near(x, y); }
bool lt(double x, double y) { return x < y && !near(x, y); }

std::string provenance_of(const RadialGrid& g) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "radial %s grid, N=%d, R_max=%g",
                g.grading == Grading::geometric ? "geometric" : "uniform",
                g.N, g.R_max);
  return buf;
}

std::string provenance_of(const PlanarGrid& g) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "planar grid, n=%d, h=%g, L=%g", g.n, g.h,
                g.L);
  return buf;
}

// Functional terms of the input, fetched on demand so an id only pays for
// what its display uses. K is wired for wave input only.
struct TermFns {
  double M = 0.0;
  std::function<double()> S;   // entropy relative to M
  std::function<double()> PM;  // potential moment
  std::function<double()> I;   // interaction
  std::function<double()> K;   // kinetic energy
};

DeficitReport eval_deficit(const InequalityQuery& q, const TermFns& t,
                           double tol, std::string provenance) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  const double M = t.M;
  DeficitReport rep;
  rep.id = q.id;
  rep.tolerance = tol;
  rep.provenance = std::move(provenance);

  switch (q.id) {
    case InequalityId::LogHls:
      rep.lhs = t.S() + 2.0 / M * t.I() + M * (1.0 + std::log(kPi));
      rep.rhs = 0.0;
      break;
    case InequalityId::LogHlsTau:
      if (!(q.tau >= 0.0))
        throw std::invalid_argument("LOG_HLS_TAU needs tau >= 0");
      rep.lhs = t.S() + 2.0 * q.tau * t.PM() +
                M * (1.0 - q.tau + std::log(kPi));
      rep.rhs = 2.0 * (q.tau - 1.0) / M * t.I();
      break;
    case InequalityId::PotentialVsInteraction:
      rep.lhs = 2.0 * t.PM() - M;
      rep.rhs = 2.0 / M * t.I();
      break;
    case InequalityId::EntropyPotential:
      if (!(q.eta > 0.0))
        throw std::invalid_argument("ENTROPY_POTENTIAL needs eta > 0");
      rep.lhs = t.S() + q.eta * t.PM();
      if (q.eta > 1.0 && !near(q.eta, 1.0)) {
        rep.rhs = M * std::log((q.eta - 1.0) / kPi);
      } else {
        rep.claimed = false;
        rep.rhs = kNan;
        rep.note = "no claim: unbounded below for eta <= 1";
      }
      break;
    case InequalityId::FreeEnergyBound: {
      rep.lhs = t.S() + q.a * t.PM() - q.b / M * t.I();
      const RegionLabel lab = classify_free_energy(q.a, q.b);
      if (lab.region == Region::Bounded) {
        rep.rhs = M * *best_known_constant(q.a, q.b);
        if (!lab.constant)
          rep.note = "best known constant; not claimed sharp";
      } else {
        rep.claimed = false;
        rep.rhs = kNan;
        rep.note = lab.region == Region::Unbounded
                       ? "no claim: (a,b) in the unbounded region"
                       : "no claim: boundedness open at (a,b)";
      }
      break;
    }
    case InequalityId::LogSobEuclidean:
      rep.lhs = t.K();
      rep.rhs = 0.5 * t.S() + 0.5 * M * (std::log(2.0 * kPi) + 2.0);
      break;
    case InequalityId::LogSobScaled:
      if (!(q.lambda > 0.0))
        throw std::invalid_argument("LOGSOB_SCALED needs lambda > 0");
      rep.lhs = q.lambda * q.lambda * t.K() - M * std::log(q.lambda);
      rep.rhs = 0.5 * t.S() + 0.5 * M * (std::log(2.0 * kPi) + 2.0);
      break;
    case InequalityId::LogSobWeissler:
      rep.lhs = M * std::log(t.K() / (kPi * std::numbers::e * M));
      rep.rhs = t.S();
      break;
    case InequalityId::KinVsInteraction:
      rep.lhs = t.K();
      rep.rhs = -t.I() / M + 0.5 * M * std::log(2.0 * std::numbers::e);
      break;
    case InequalityId::KinVsInteractionScaled:
      if (!(q.lambda > 0.0))
        throw std::invalid_argument(
            "KIN_VS_INTERACTION_SCALED needs lambda > 0");
      rep.lhs = q.lambda * q.lambda * t.K() - M * std::log(q.lambda);
      rep.rhs = -t.I() / M + 0.5 * M * std::log(2.0 * std::numbers::e);
      break;
    case InequalityId::ScaleInvariant:
      rep.lhs = 0.5 * M * M * std::log(t.K() / M);
      rep.rhs = -t.I();
      break;
  }

  rep.deficit = rep.lhs - rep.rhs;
  rep.pass = !rep.claimed || rep.deficit >= -rep.tolerance;
  return rep;
}

void require_density_id(InequalityId id) {
  if (takes_wave(id))
    throw std::invalid_argument(to_string(id) +
                                " needs a wave function input");
}

void require_wave_id(InequalityId id) {
  if (!takes_wave(id))
    throw std::invalid_argument(to_string(id) + " needs a density input");
}

}  // namespace

std::string to_string(InequalityId id) {
  switch (id) {
    case InequalityId::LogHls: return "LOG_HLS";
    case InequalityId::LogHlsTau: return "LOG_HLS_TAU";
    case InequalityId::PotentialVsInteraction:
      return "POTENTIAL_VS_INTERACTION";
    case InequalityId::EntropyPotential: return "ENTROPY_POTENTIAL";
    case InequalityId::FreeEnergyBound: return "FREE_ENERGY_BOUND";
    case InequalityId::LogSobEuclidean: return "LOGSOB_EUCLIDEAN";
    case InequalityId::LogSobScaled: return "LOGSOB_SCALED";
    case InequalityId::LogSobWeissler: return "LOGSOB_WEISSLER";
    case InequalityId::KinVsInteraction: return "KIN_VS_INTERACTION";
    case InequalityId::KinVsInteractionScaled:
      return "KIN_VS_INTERACTION_SCALED";
    case InequalityId::ScaleInvariant: return "SCALE_INVARIANT";
  }
  throw std::logic_error("unreachable inequality id");
}

InequalityId parse_inequality_id(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  static const std::pair<const char*, InequalityId> table[] = {
      {"LOG_HLS", InequalityId::LogHls},
      {"LOG_HLS_TAU", InequalityId::LogHlsTau},
      {"POTENTIAL_VS_INTERACTION", InequalityId::PotentialVsInteraction},
      {"ENTROPY_POTENTIAL", InequalityId::EntropyPotential},
      {"FREE_ENERGY_BOUND", InequalityId::FreeEnergyBound},
      {"LOGSOB_EUCLIDEAN", InequalityId::LogSobEuclidean},
      {"LOGSOB_SCALED", InequalityId::LogSobScaled},
      {"LOGSOB_WEISSLER", InequalityId::LogSobWeissler},
      {"KIN_VS_INTERACTION", InequalityId::KinVsInteraction},
      {"KIN_VS_INTERACTION_SCALED", InequalityId::KinVsInteractionScaled},
      {"SCALE_INVARIANT", InequalityId::ScaleInvariant},
  };
  for (const auto& [key, id] : table)
    if (up == key) return id;
  throw std::invalid_argument("unknown inequality id: " + name);
}

bool takes_wave(InequalityId id) {
  switch (id) {
    case InequalityId::LogSobEuclidean:
    case InequalityId::LogSobScaled:
    case InequalityId::LogSobWeissler:
    case InequalityId::KinVsInteraction:
    case InequalityId::KinVsInteractionScaled:
    case InequalityId::ScaleInvariant:
      return true;
    default:
      return false;
  }
}

InequalityQuery InequalityQuery::log_hls() {
  return {InequalityId::LogHls};
}
InequalityQuery InequalityQuery::log_hls_tau(double tau) {
  InequalityQuery q{InequalityId::LogHlsTau};
  q.tau = tau;
  return q;
}
InequalityQuery InequalityQuery::potential_vs_interaction() {
  return {InequalityId::PotentialVsInteraction};
}
InequalityQuery InequalityQuery::entropy_potential(double eta) {
  InequalityQuery q{InequalityId::EntropyPotential};
  q.eta = eta;
  return q;
}
InequalityQuery InequalityQuery::free_energy_bound(double a, double b) {
  InequalityQuery q{InequalityId::FreeEnergyBound};
  q.a = a;
  q.b = b;
  return q;
}
InequalityQuery InequalityQuery::logsob_euclidean() {
  return {InequalityId::LogSobEuclidean};
}
InequalityQuery InequalityQuery::logsob_scaled(double lambda) {
  InequalityQuery q{InequalityId::LogSobScaled};
  q.lambda = lambda;
  return q;
}
InequalityQuery InequalityQuery::logsob_weissler() {
  return {InequalityId::LogSobWeissler};
}
InequalityQuery InequalityQuery::kin_vs_interaction() {
  return {InequalityId::KinVsInteraction};
}
InequalityQuery InequalityQuery::kin_vs_interaction_scaled(double lambda) {
  InequalityQuery q{InequalityId::KinVsInteractionScaled};
  q.lambda = lambda;
  return q;
}
InequalityQuery InequalityQuery::scale_invariant() {
  return {InequalityId::ScaleInvariant};
}

DeficitReport deficit(const InequalityQuery& q, const RadialDensity& rho,
                      double tolerance) {
  require_density_id(q.id);
  TermFns t;
  t.M = rho.mass;
  t.S = [&rho] { return entropy(rho, rho.mass); };
  t.PM = [&rho] { return potential_moment(rho); };
  t.I = [&rho] { return interaction(rho); };
  return eval_deficit(q, t, tolerance, provenance_of(*rho.grid));
}

DeficitReport deficit(const InequalityQuery& q, const PlanarDensity& rho,
                      double tolerance) {
  require_density_id(q.id);
  TermFns t;
  t.M = rho.mass;
  t.S = [&rho] { return entropy(rho, rho.mass); };
  t.PM = [&rho] { return potential_moment(rho); };
  t.I = [&rho] { return interaction_planar(rho); };
  return eval_deficit(q, t, tolerance, provenance_of(rho.grid));
}

DeficitReport deficit(const InequalityQuery& q, const WaveFunction& u,
                      double tolerance) {
  require_wave_id(q.id);
  return deficit(q, u, density_of(u), tolerance);
}

DeficitReport deficit(const InequalityQuery& q, const WaveFunction& u,
                      const RadialDensity& rho, double tolerance) {
  require_wave_id(q.id);
  const RadialGrid& gu = *u.grid;
  const RadialGrid& gr = *rho.grid;
  const bool same_grid =
      u.grid == rho.grid || (gu.N == gr.N && gu.R_max == gr.R_max &&
                             gu.grading == gr.grading);
  if (!same_grid)
    throw std::invalid_argument("wave and density live on different grids");
  if (std::abs(u.mass - rho.mass) > 1e-9 * std::max(1.0, u.mass))
    throw std::invalid_argument("wave and density masses disagree");
  TermFns t;
  t.M = u.mass;
  t.S = [&rho] { return entropy(rho, rho.mass); };
  t.PM = [&rho] { return potential_moment(rho); };
  t.I = [&rho] { return interaction(rho); };
  t.K = [&u] { return kinetic(u); };
  return eval_deficit(q, t, tolerance, provenance_of(gu));
}

std::string to_string(Region r) {
  switch (r) {
    case Region::Bounded: return "Bounded";
    case Region::Unbounded: return "Unbounded";
    case Region::Unknown: return "Unknown";
  }
  throw std::logic_error("unreachable region");
}

RegionLabel classify_free_energy(double a, double b) {
  RegionLabel out;

  // Snap onto the critical lines; near their crossing at (1,0) the two
  // snaps agree. The threshold line takes precedence so that points on it
  // are never silently absorbed into an adjacent open region.
  if (near(a, 0.0)) a = 0.0;
  if (near(a, 1.0)) a = 1.0;
  if (near(b, -2.0)) b = -2.0;
  if (near(b, a - 1.0)) b = a - 1.0;
  else if (near(b, 2.0 * a - 2.0)) b = 2.0 * a - 2.0;

  if (a == 0.0 && b == -2.0) {
    out.region = Region::Bounded;
    out.constant = -(1.0 + std::log(kPi));
    return out;
  }
  if (a < 0.0) {
    out.region = Region::Unbounded;
    out.witness = "TRANSLATE";
    return out;
  }
  if (b < -2.0) {
    out.region = Region::Unbounded;
    out.witness = "SCALE";
    return out;
  }
  if (a == 1.0 && b == 0.0) {
    // diverges, but not along any one of the witness families; the
    // divergence there is a limit of the b = 0 constants as a -> 1
    out.region = Region::Unbounded;
    return out;
  }
  const double bmin = std::min(a - 1.0, 2.0 * a - 2.0);
  if (b > bmin) {
    out.region = Region::Unbounded;
    out.witness = b > 2.0 * a - 2.0 ? "SCALE" : "TWO_BUBBLE";
    return out;
  }
  if (a > 1.0 && b == a - 1.0) {
    out.region = Region::Unknown;
    return out;
  }

  // a > 0, -2 <= b < a-1 and b <= 2a-2
  out.region = Region::Bounded;
  if (b == 2.0 * a - 2.0)
    out.constant = -std::log(std::numbers::e * kPi / (1.0 - a));
  else if (near(b, a - 2.0))
    out.constant = 0.5 * a - 1.0 - std::log(kPi);
  return out;
}

RegionLabel classify_schrodinger(const SchrodingerParams& p) {
  if (!(p.M > 0.0)) throw std::invalid_argument("classify needs M > 0");
  RegionLabel out;
  const double Mb = p.M * p.beta;
  const double t1 = 2.0 * p.alpha - p.gamma;
  const double t2 = 4.0 * p.alpha - 2.0 * p.gamma;

  if (lt(p.alpha, 0.0)) {
    out.region = Region::Unbounded;
    out.witness = "TRANSLATE";
    return out;
  }
  if (lt(std::min(t1, t2), Mb)) {
    out.region = Region::Unbounded;
    out.witness = lt(t2, Mb) ? "WAVE_SCALE" : "TWO_BUBBLE";
    return out;
  }
  if (near(p.alpha, 0.0)) {
    if (le(p.beta, 0.0) && le(Mb + 2.0 * p.gamma, 0.0))
      out.region = Region::Bounded;
    else
      out.region = Region::Unknown;
    return out;
  }
  // alpha > 0
  if (le(p.gamma, 0.0) && le(Mb, 2.0 * p.alpha)) {
    out.region = Region::Bounded;
    return out;
  }
  if (lt(0.0, p.gamma) && le(Mb, t2) && lt(Mb, t1)) {
    out.region = Region::Bounded;
    return out;
  }
  out.region = Region::Unknown;
  return out;
}

std::optional<double> best_known_constant(double a, double b) {
  const RegionLabel lab = classify_free_energy(a, b);
  if (lab.region != Region::Bounded) return std::nullopt;
  if (lab.constant) return lab.constant;  // sharp on the special lines
  if (near(b, -2.0)) return -(1.0 + std::log(kPi));
  if (near(b, 0.0)) return std::log((a - 1.0) / kPi);
  if (b < 0.0)
    return 0.5 * (1.0 + std::log(kPi)) * b +
           0.5 * (b + 2.0) * std::log((2.0 * a - 2.0 - b) / (kPi * (b + 2.0)));
  return 0.5 * b + std::log((a - b - 1.0) / kPi);
}

namespace {

std::vector<double> ticks(double lo, double hi, double step) {
  std::vector<double> v;
  if (!(step > 0.0) || hi < lo) return v;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  v.reserve(n);
  for (int i = 0; i < n; ++i) v.push_back(lo + i * step);
  return v;
}

void check_finite(const ScanRange& r) {
  if (!std::isfinite(r.x_min) || !std::isfinite(r.x_max) ||
      !std::isfinite(r.y_min) || !std::isfinite(r.y_max) ||
      !std::isfinite(r.step))
    throw std::invalid_argument("phase scan needs finite ranges");
}

}  // namespace

PhaseDiagram scan_free_energy(const ScanRange& r) {
  check_finite(r);
  PhaseDiagram d;
  d.xs = ticks(r.x_min, r.x_max, r.step);
  d.ys = ticks(r.y_min, r.y_max, r.step);
  d.cells.reserve(d.xs.size() * d.ys.size());
  for (double a : d.xs)
    for (double b : d.ys)
      d.cells.push_back({a, b, classify_free_energy(a, b)});
  return d;
}

PhaseDiagram scan_schrodinger(const ScanRange& r, double alpha, double M) {
  check_finite(r);
  PhaseDiagram d;
  d.xs = ticks(r.x_min, r.x_max, r.step);
  d.ys = ticks(r.y_min, r.y_max, r.step);
  d.cells.reserve(d.xs.size() * d.ys.size());
  for (double g : d.xs)
    for (double beta : d.ys) {
      SchrodingerParams p;
      p.alpha = alpha;
      p.beta = beta;
      p.gamma = g;
      p.M = M;
      d.cells.push_back({g, beta, classify_schrodinger(p)});
    }
  return d;
}

PhaseDiagram scan_phase_diagram(PhaseWhich which, const ScanRange& r,
                                double alpha, double M) {
  return which == PhaseWhich::FreeEnergy ? scan_free_energy(r)
                                         : scan_schrodinger(r, alpha, M);
}

}  // namespace logfe
