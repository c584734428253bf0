#include "logfe/divergence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "logfe/inequalities.hpp"

namespace logfe {

namespace {

std::shared_ptr<const RadialGrid> shared_geo(int N, double R) {
  return std::make_shared<RadialGrid>(make_radial_grid(N, R, Grading::geometric));
}

// base profile on a grid wide enough for its support and tail series
RadialDensity base_density(const FamilyConfig& f) {
  const double R = std::max({f.grid_r, min_grid_radius(f.base), 2.0 * support_radius(f.base)});
  return discretize(f.base, shared_geo(f.grid_n, R));
}

void check_config(const FamilyConfig& f) {
  if (f.seq.size() < 4)
    throw std::invalid_argument("family too short: need at least 4 members to fit a slope");
  for (double s : f.seq)
    if (!std::isfinite(s) || !(s > 0.0))
      throw std::invalid_argument("family parameters must be positive and finite");
  const int dir = f.seq.back() > f.seq.front() ? +1 : -1;
  for (size_t i = 1; i < f.seq.size(); ++i)
    if (!(dir > 0 ? f.seq[i] > f.seq[i - 1] : f.seq[i] < f.seq[i - 1]))
      throw std::invalid_argument("family parameters must be strictly monotone");
  if (f.grid_n < 64) throw std::invalid_argument("family grid is too coarse");
  if (!(f.grid_r > 0.0)) throw std::invalid_argument("family grid radius must be positive");

  switch (f.id) {
    case FamilyId::Translate:
      if (dir < 0) throw std::invalid_argument("TRANSLATE escapes with the offset increasing");
      break;
    case FamilyId::Scale:
      if (dir < 0 && f.base.kind != FamilyKind::annulus_bump)
        throw std::invalid_argument(
            "SCALE toward lambda = 0 needs the annulus-supported base: the moment "
            "asymptotics require support away from the origin");
      break;
    case FamilyId::TwoBubble:
      if (f.base.kind != FamilyKind::annulus_bump)
        throw std::invalid_argument("TWO_BUBBLE needs the annulus-supported base");
      if (dir > 0) throw std::invalid_argument("TWO_BUBBLE escapes with lambda decreasing to 0");
      if (!(f.eps > 0.0 && f.eps < 1.0))
        throw std::invalid_argument("TWO_BUBBLE mixing fraction must lie in (0, 1)");
      for (double lam : f.seq)
        if (!(lam < 0.5))
          throw std::invalid_argument("TWO_BUBBLE needs lambda < 1/2: the bubbles must stay disjoint");
      break;
    case FamilyId::Lattice:
      if (f.base.kind != FamilyKind::unit_ball_bump)
        throw std::invalid_argument("LATTICE needs the unit-ball-supported base");
      if (dir < 0) throw std::invalid_argument("LATTICE escapes with n increasing");
      if (!(f.A > 1.0)) throw std::invalid_argument("LATTICE needs concentration exponent A > 1");
      for (double n : f.seq) {
        if (!(n >= 2.0) || n != std::floor(n))
          throw std::invalid_argument("LATTICE members are indexed by integers n >= 2");
        if (!(std::pow(n, -f.A) < 0.25))
          throw std::invalid_argument("LATTICE needs eps = n^-A < 1/4: the bumps must stay disjoint");
      }
      break;
    case FamilyId::WaveScale:
      if (dir > 0) throw std::invalid_argument("WAVE_SCALE escapes with lambda decreasing to 0");
      break;
  }
}

void check_mass(const FamilyConfig& f, double M) {
  if (std::abs(M - f.base.M) > 1e-12 * std::max(1.0, std::abs(M)))
    throw std::invalid_argument("functional mass must match the family mass");
}

// (1-eps) rho + eps lambda^2 rho(lambda .); the outer bubble sits on
// [1/lambda, 2/lambda], so the grid is widened to keep it interior
RadialDensity two_bubble_member(const FamilyConfig& f, double lam) {
  const double R = std::max(f.grid_r, 2.5 / lam);
  auto g = shared_geo(f.grid_n, R);
  const ClosedFormFamily base = f.base;
  const double eps = f.eps;
  auto profile = [base, eps, lam](double r) {
    return (1.0 - eps) * evaluate(base, r) + eps * lam * lam * evaluate(base, lam * r);
  };
  std::vector<double> v(g->N);
  for (int i = 0; i < g->N; ++i) v[i] = profile(g->nodes[i]);
  return make_radial_density(g, std::move(v), base.M, {}, {}, {}, 0, profile);
}

// least-squares slope over the tail half of the members
double ols_tail_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t m = x.size();
  const size_t k = (m + 1) / 2;
  const size_t from = m - k;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = from; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double n = double(k);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void init_estimate(SlopeEstimate& est, const FamilyConfig& f) {
  est.family = f.id;
  est.direction = direction_of(f);
  est.param = f.seq;
  const size_t m = f.seq.size();
  est.abscissa.resize(m);
  for (size_t i = 0; i < m; ++i) est.abscissa[i] = std::log(f.seq[i]);
  est.energy.assign(m, 0.0);
  est.entropy_term.assign(m, 0.0);
  est.potential_term.assign(m, 0.0);
  est.interaction_term.assign(m, 0.0);
  est.kinetic_term.assign(m, 0.0);
}

void finish_fit(SlopeEstimate& est, double analytic) {
  est.fitted = ols_tail_slope(est.abscissa, est.energy);
  est.analytic = analytic;
  est.rel_error = std::abs(est.fitted - analytic) / std::max(std::abs(analytic), 1e-12);
  est.confirmed = est.direction * est.fitted < 0.0 && est.rel_error <= 0.05;
}

}  // namespace

std::string to_string(FamilyId id) {
  switch (id) {
    case FamilyId::Translate: return "TRANSLATE";
    case FamilyId::Scale: return "SCALE";
    case FamilyId::TwoBubble: return "TWO_BUBBLE";
    case FamilyId::Lattice: return "LATTICE";
    case FamilyId::WaveScale: return "WAVE_SCALE";
  }
  return "?";
}

FamilyId parse_family_id(const std::string& name) {
  std::string u;
  u.reserve(name.size());
  for (char c : name)
    u.push_back(c == '-' ? '_' : char(std::toupper(static_cast<unsigned char>(c))));
  if (u == "TRANSLATE") return FamilyId::Translate;
  if (u == "SCALE") return FamilyId::Scale;
  if (u == "TWO_BUBBLE") return FamilyId::TwoBubble;
  if (u == "LATTICE") return FamilyId::Lattice;
  if (u == "WAVE_SCALE") return FamilyId::WaveScale;
  throw std::invalid_argument("unknown family id: " + name);
}

int direction_of(const FamilyConfig& f) {
  if (f.seq.size() < 2) throw std::invalid_argument("family needs at least two members");
  return f.seq.back() > f.seq.front() ? +1 : -1;
}

std::vector<RadialDensity> make_family(const FamilyConfig& f) {
  check_config(f);
  std::vector<RadialDensity> out;
  out.reserve(f.seq.size());
  switch (f.id) {
    case FamilyId::Scale: {
      const RadialDensity base = base_density(f);
      for (double lam : f.seq) out.push_back(scale_density(base, lam));
      break;
    }
    case FamilyId::TwoBubble:
      for (double lam : f.seq) out.push_back(two_bubble_member(f, lam));
      break;
    case FamilyId::WaveScale:
      throw std::invalid_argument("WAVE_SCALE members are wave functions; use make_wave_family");
    default:
      throw std::invalid_argument(
          "this family has no radial realization: its members differ only by off-center placement");
  }
  return out;
}

std::vector<WaveFunction> make_wave_family(const FamilyConfig& f) {
  check_config(f);
  std::vector<WaveFunction> out;
  out.reserve(f.seq.size());
  switch (f.id) {
    case FamilyId::WaveScale: {
      const WaveFunction u0 = sqrt_of(base_density(f));
      for (double lam : f.seq) out.push_back(scale_wave(u0, lam));
      break;
    }
    case FamilyId::TwoBubble:
      for (double lam : f.seq) out.push_back(sqrt_of(two_bubble_member(f, lam)));
      break;
    default:
      throw std::invalid_argument("only TWO_BUBBLE and WAVE_SCALE have wave realizations");
  }
  return out;
}

std::vector<LatticeTerms> lattice_terms(const FamilyConfig& f) {
  if (f.id != FamilyId::Lattice) throw std::invalid_argument("lattice_terms needs a LATTICE family");
  check_config(f);

  const RadialDensity base = base_density(f);
  const double M = base.mass;
  const double S_base = entropy(base, M);
  const double I_base = interaction(base);

  std::vector<LatticeTerms> out;
  out.reserve(f.seq.size());
  for (double nd : f.seq) {
    const int n = int(nd);
    const double eps = std::pow(nd, -f.A);
    const double n2 = nd * nd;

    LatticeTerms t;
    t.n = nd;
    t.eps = eps;

    // the n^2 bumps are disjoint, so the entropy integral splits exactly and
    // each copy carries the concentration factor eps^-2 / n^2
    t.entropy_rel = S_base - 2.0 * M * std::log(nd * eps);

    // off-center moment of each bump via the exact angular mean of the kernel
    const RadialDensity bump = scale_density(base, 1.0 / eps);
    double pm = 0.0;
    for (int k = 1; k <= n; ++k)
      for (int l = 1; l <= n; ++l)
        pm += potential_moment_translated(bump, std::hypot(double(k), double(l)));
    t.potential = pm / n2;

    // self energy of one bump scales exactly; the cross term of two disjoint
    // radial bumps at center distance D is exactly (M/n^2)^2 log D by the
    // circular mean-value property of the log kernel, applied twice
    double cross = 0.0;
    for (int k = 1; k <= n; ++k)
      for (int l = 1; l <= n; ++l)
        for (int k2 = 1; k2 <= n; ++k2)
          for (int l2 = 1; l2 <= n; ++l2) {
            if (k == k2 && l == l2) continue;
            const double dx = k - k2, dy = l - l2;
            cross += 0.5 * std::log(dx * dx + dy * dy);
          }
    t.interaction = (I_base + M * M * std::log(eps)) / n2 + M * M * cross / (n2 * n2);
    out.push_back(t);
  }
  return out;
}

double analytic_slope(const FamilyConfig& f, const FreeEnergyParams& p) {
  switch (f.id) {
    case FamilyId::Translate:
      // only the moment moves: log(1 + |x0|^2) ~ 2 log|x0|
      return 2.0 * p.a * p.M;
    case FamilyId::Scale:
      // entropy gains 2 M log lambda and the interaction -M^2 log lambda;
      // toward lambda = 0 the annulus support adds -2 M log lambda of moment
      return direction_of(f) > 0 ? (2.0 * p.c + p.b) * p.M
                                 : (2.0 * p.c + p.b - 2.0 * p.a) * p.M;
    case FamilyId::TwoBubble:
      // the eps-bubble spreads: entropy and moment move by +-2 eps M log
      // lambda, the interaction by -eps (2 - eps) M^2 log lambda
      return 2.0 * f.eps * (p.c - p.a + (1.0 - 0.5 * f.eps) * p.b) * p.M;
    case FamilyId::Lattice:
      // per log n: entropy 2 (A-1) M, moment 2 M, pair distances M^2
      return (2.0 * (f.A - 1.0) * p.c + 2.0 * p.a - p.b) * p.M;
    case FamilyId::WaveScale:
      throw std::invalid_argument("WAVE_SCALE carries a kinetic term; measure it with SchrodingerParams");
  }
  throw std::logic_error("unreachable");
}

double analytic_slope(const FamilyConfig& f, const SchrodingerParams& p) {
  switch (f.id) {
    case FamilyId::Translate:
      return 4.0 * p.alpha * p.M;
    case FamilyId::WaveScale:
      // lambda^2 K vanishes; the density terms follow the dilation rates
      return p.M * (p.beta * p.M - 4.0 * p.alpha + 2.0 * p.gamma);
    case FamilyId::TwoBubble:
      return f.eps * p.M * (2.0 * p.gamma - 4.0 * p.alpha + (2.0 - f.eps) * p.beta * p.M);
    default:
      throw std::invalid_argument("this family has no wave realization");
  }
}

SlopeEstimate measure_slope(const FamilyConfig& f, const FreeEnergyParams& p) {
  if (f.id == FamilyId::WaveScale)
    throw std::invalid_argument("WAVE_SCALE carries a kinetic term; measure it with SchrodingerParams");
  check_config(f);
  check_mass(f, p.M);

  SlopeEstimate est;
  init_estimate(est, f);
  char buf[128];
  std::snprintf(buf, sizeof buf, "free_energy(a=%g, b=%g, c=%g, M=%g)", p.a, p.b, p.c, p.M);
  est.functional = buf;

  const size_t m = f.seq.size();
  switch (f.id) {
    case FamilyId::Translate: {
      const RadialDensity base = base_density(f);
      const double S = entropy(base, p.M);
      const double I = interaction(base);
      for (size_t i = 0; i < m; ++i) {
        est.entropy_term[i] = S;
        est.interaction_term[i] = I;
        est.potential_term[i] = potential_moment_translated(base, f.seq[i]);
      }
      break;
    }
    case FamilyId::Scale:
    case FamilyId::TwoBubble: {
      const auto members = make_family(f);
      for (size_t i = 0; i < m; ++i) {
        est.entropy_term[i] = entropy(members[i], p.M);
        est.potential_term[i] = potential_moment(members[i]);
        est.interaction_term[i] = interaction(members[i]);
      }
      break;
    }
    case FamilyId::Lattice: {
      const auto terms = lattice_terms(f);
      for (size_t i = 0; i < m; ++i) {
        est.entropy_term[i] = terms[i].entropy_rel;
        est.potential_term[i] = terms[i].potential;
        est.interaction_term[i] = terms[i].interaction;
      }
      break;
    }
    case FamilyId::WaveScale:
      break;  // rejected above
  }

  for (size_t i = 0; i < m; ++i)
    est.energy[i] = p.c * est.entropy_term[i] + p.a * est.potential_term[i] -
                    (p.b / p.M) * est.interaction_term[i];
  finish_fit(est, analytic_slope(f, p));
  return est;
}

SlopeEstimate measure_slope(const FamilyConfig& f, const SchrodingerParams& p) {
  if (f.id == FamilyId::Scale)
    throw std::invalid_argument("SCALE is a density family; the wave dilation is WAVE_SCALE");
  if (f.id == FamilyId::Lattice)
    throw std::invalid_argument("LATTICE has no wave realization");
  check_config(f);
  check_mass(f, p.M);

  SlopeEstimate est;
  init_estimate(est, f);
  char buf[128];
  std::snprintf(buf, sizeof buf, "schrodinger(alpha=%g, beta=%g, gamma=%g, M=%g)", p.alpha,
                p.beta, p.gamma, p.M);
  est.functional = buf;

  const size_t m = f.seq.size();
  switch (f.id) {
    case FamilyId::Translate: {
      const RadialDensity base = base_density(f);
      const double S = entropy(base, p.M);
      const double I = interaction(base);
      const double K = kinetic(sqrt_of(base));
      for (size_t i = 0; i < m; ++i) {
        est.entropy_term[i] = S;
        est.interaction_term[i] = I;
        est.kinetic_term[i] = K;
        est.potential_term[i] = potential_moment_translated(base, f.seq[i]);
      }
      break;
    }
    case FamilyId::WaveScale: {
      const RadialDensity base = base_density(f);
      for (size_t i = 0; i < m; ++i) {
        const RadialDensity member = scale_density(base, f.seq[i]);
        est.entropy_term[i] = entropy(member, p.M);
        est.potential_term[i] = potential_moment(member);
        est.interaction_term[i] = interaction(member);
        est.kinetic_term[i] = kinetic(sqrt_of(member));
      }
      break;
    }
    case FamilyId::TwoBubble: {
      for (size_t i = 0; i < m; ++i) {
        const RadialDensity member = two_bubble_member(f, f.seq[i]);
        est.entropy_term[i] = entropy(member, p.M);
        est.potential_term[i] = potential_moment(member);
        est.interaction_term[i] = interaction(member);
        est.kinetic_term[i] = kinetic(sqrt_of(member));
      }
      break;
    }
    default:
      break;  // rejected above
  }

  const double log_mass = p.M * std::log(p.M);
  for (size_t i = 0; i < m; ++i)
    est.energy[i] = est.kinetic_term[i] + 2.0 * p.alpha * est.potential_term[i] -
                    p.beta * est.interaction_term[i] +
                    p.gamma * (est.entropy_term[i] + log_mass);
  finish_fit(est, analytic_slope(f, p));
  return est;
}

namespace {

std::vector<double> dyadic(double first, int count, bool decreasing) {
  std::vector<double> v(count);
  double x = first;
  for (int i = 0; i < count; ++i) {
    v[i] = x;
    x = decreasing ? 0.5 * x : 2.0 * x;
  }
  return v;
}

}  // namespace

std::optional<FamilyConfig> witness_config(double a, double b) {
  const RegionLabel lab = classify_free_energy(a, b);
  if (lab.region != Region::Unbounded || lab.witness.empty()) return std::nullopt;

  FamilyConfig f;
  if (lab.witness == "TRANSLATE") {
    f.id = FamilyId::Translate;
    f.base = ClosedFormFamily::parse("gaussian");
    f.seq = dyadic(8.0, 6, false);
  } else if (lab.witness == "SCALE") {
    f.id = FamilyId::Scale;
    if (b < -2.0) {
      f.base = ClosedFormFamily::parse("rho-star");
      f.seq = dyadic(4.0, 6, false);
    } else {
      f.base = ClosedFormFamily::parse("annulus-bump");
      f.seq = dyadic(0.25, 6, true);
    }
  } else {
    f.id = FamilyId::TwoBubble;
    f.base = ClosedFormFamily::parse("annulus-bump");
    f.seq = dyadic(0.125, 5, true);
    // keep (1 - eps/2) b + 1 - a > 0 so the mixture still descends
    f.eps = b > 0.0 ? std::min(0.3, 0.9 * (2.0 - 2.0 * (a - 1.0) / b)) : 0.3;
  }
  return f;
}

std::optional<FamilyConfig> witness_config(const SchrodingerParams& p) {
  const RegionLabel lab = classify_schrodinger(p);
  if (lab.region != Region::Unbounded || lab.witness.empty()) return std::nullopt;

  FamilyConfig f;
  f.base.M = p.M;
  if (lab.witness == "TRANSLATE") {
    f.id = FamilyId::Translate;
    f.base.kind = FamilyKind::gaussian;
    f.seq = dyadic(8.0, 6, false);
  } else if (lab.witness == "WAVE_SCALE") {
    f.id = FamilyId::WaveScale;
    f.base.kind = FamilyKind::annulus_bump;
    f.seq = dyadic(0.25, 6, true);
  } else {
    f.id = FamilyId::TwoBubble;
    f.base.kind = FamilyKind::annulus_bump;
    f.seq = dyadic(0.125, 5, true);
    // keep (2 - eps) beta M > 4 alpha - 2 gamma so the mixture still descends
    const double bM = p.beta * p.M;
    f.eps = bM > 0.0 ? std::min(0.3, 0.9 * (2.0 - (4.0 * p.alpha - 2.0 * p.gamma) / bM)) : 0.3;
  }
  return f;
}

}  // namespace logfe
