#pragma once

// Finite sums of  c * r^e * (log r)^q  with closed-form moments.
// Used for analytic handling of density tails (r >= R_max) and of
// integrable power singularities at the origin, so that truncation
// and singular-cell errors stay below quadrature error.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace logfe {

struct PowerLogTerm {
  double coef = 0.0;
  double expo = 0.0;  // power of r
  int logpow = 0;     // power of log r, >= 0
};

class PowerLogSeries {
public:
  PowerLogSeries() = default;
  explicit PowerLogSeries(std::vector<PowerLogTerm> t) : terms_(std::move(t)) { compact(); }

  static PowerLogSeries constant(double c) { return PowerLogSeries({{c, 0.0, 0}}); }
  static PowerLogSeries monomial(double c, double e, int q = 0) { return PowerLogSeries({{c, e, q}}); }

  const std::vector<PowerLogTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(double c, double e, int q) { terms_.push_back({c, e, q}); }

  PowerLogSeries& operator+=(const PowerLogSeries& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    compact();
    return *this;
  }
  friend PowerLogSeries operator+(PowerLogSeries a, const PowerLogSeries& b) { return a += b; }

  PowerLogSeries operator*(double s) const {
    PowerLogSeries out = *this;
    for (auto& t : out.terms_) t.coef *= s;
    return out;
  }

  PowerLogSeries operator*(const PowerLogSeries& o) const {
    std::vector<PowerLogTerm> prod;
    prod.reserve(terms_.size() * o.terms_.size());
    for (const auto& t : terms_)
      for (const auto& u : o.terms_)
        prod.push_back({t.coef * u.coef, t.expo + u.expo, t.logpow + u.logpow});
    return PowerLogSeries(std::move(prod));
  }

  // Series for f(r^beta) expressed in r (beta > 0)
  PowerLogSeries with_power_argument(double beta) const {
    std::vector<PowerLogTerm> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
      double c = t.coef;
      for (int k = 0; k < t.logpow; ++k) c *= beta;
      out.push_back({c, t.expo * beta, t.logpow});
    }
    return PowerLogSeries(std::move(out));
  }

  // drop terms negligible relative to the series magnitude at r_ref
  PowerLogSeries pruned(double r_ref, double rel_floor = 1e-18) const {
    double scale = 0.0;
    const double lr = std::abs(std::log(r_ref));
    for (const auto& t : terms_)
      scale = std::max(scale, std::abs(t.coef) * std::pow(r_ref, t.expo) * ipow(std::max(lr, 1.0), t.logpow));
    std::vector<PowerLogTerm> out;
    for (const auto& t : terms_) {
      const double m = std::abs(t.coef) * std::pow(r_ref, t.expo) * ipow(std::max(lr, 1.0), t.logpow);
      if (m >= rel_floor * scale) out.push_back(t);
    }
    return PowerLogSeries(std::move(out));
  }

  // Series for f(lam * r) expressed in r: (log lam + log r)^q binomially expanded.
  PowerLogSeries with_scaled_argument(double lam) const {
    if (lam <= 0.0) throw std::invalid_argument("series scale must be positive");
    const double ll = std::log(lam);
    std::vector<PowerLogTerm> out;
    for (const auto& t : terms_) {
      const double base = t.coef * std::pow(lam, t.expo);
      double binom = 1.0;  // C(q, k) * ll^k accumulated
      for (int k = 0; k <= t.logpow; ++k) {
        out.push_back({base * binom, t.expo, t.logpow - k});
        binom *= ll * double(t.logpow - k) / double(k + 1);
      }
    }
    return PowerLogSeries(std::move(out));
  }

  double eval(double r) const {
    const double lr = std::log(r);
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * std::pow(r, t.expo) * ipow(lr, t.logpow);
    return s;
  }

  // integral over (0, X] of f(r) * r dr; every term needs expo > -2
  double integral_origin(double X) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.expo <= -2.0)
        throw std::domain_error("origin moment requires exponent > -2");
      s += t.coef * lower_moment(t.expo + 1.0, t.logpow, X);
    }
    return s;
  }

  // integral over [X, inf) of f(r) * r dr; every term needs expo < -2
  double integral_tail(double X) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.expo >= -2.0)
        throw std::domain_error("tail moment requires exponent < -2");
      s += t.coef * upper_moment(t.expo + 1.0, t.logpow, X);
    }
    return s;
  }

  // indefinite integral of f(r) * r dr, as a new series (valid away from r=0)
  PowerLogSeries antiderivative_rdr() const {
    std::vector<PowerLogTerm> out;
    for (const auto& t : terms_) append_antiderivative(out, t.coef, t.expo + 1.0, t.logpow);
    return PowerLogSeries(std::move(out));
  }

  double leading_exponent() const {
    if (terms_.empty()) throw std::logic_error("empty series has no leading exponent");
    double e = terms_.front().expo;
    for (const auto& t : terms_) e = std::min(e, t.expo);
    return e;
  }

private:
  std::vector<PowerLogTerm> terms_;

  static double ipow(double x, int n) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= x;
    return p;
  }

  // int_0^X r^p log^q r dr, p > -1
  static double lower_moment(double p, int q, double X) {
    const double head = std::pow(X, p + 1.0) / (p + 1.0);
    double s = head * ipow(std::log(X), q);
    if (q > 0) s -= double(q) / (p + 1.0) * lower_moment(p, q - 1, X);
    return s;
  }

  // int_X^inf r^p log^q r dr, p < -1
  static double upper_moment(double p, int q, double X) {
    double s = -std::pow(X, p + 1.0) / (p + 1.0) * ipow(std::log(X), q);
    if (q > 0) s -= double(q) / (p + 1.0) * upper_moment(p, q - 1, X);
    return s;
  }

  static void append_antiderivative(std::vector<PowerLogTerm>& out, double c, double p, int q) {
    if (std::abs(p + 1.0) < 1e-12) {
      // int r^-1 log^q = log^{q+1} / (q+1)
      out.push_back({c / double(q + 1), 0.0, q + 1});
      return;
    }
    out.push_back({c / (p + 1.0), p + 1.0, q});
    if (q > 0) append_antiderivative(out, -c * double(q) / (p + 1.0), p, q - 1);
  }

  void compact() {
    std::vector<PowerLogTerm> merged;
    for (const auto& t : terms_) {
      if (t.coef == 0.0) continue;
      bool found = false;
      for (auto& m : merged) {
        if (m.logpow == t.logpow && std::abs(m.expo - t.expo) < 1e-14) {
          m.coef += t.coef;
          found = true;
          break;
        }
      }
      if (!found) merged.push_back(t);
    }
    terms_ = std::move(merged);
  }
};

// log(1 + u * r^e) expanded to n terms; valid where |u * r^e| < 1
inline PowerLogSeries log1p_power_series(double u, double e, int n) {
  std::vector<PowerLogTerm> t;
  t.reserve(std::size_t(n));
  double uk = u;
  for (int k = 1; k <= n; ++k) {
    t.push_back({(k % 2 ? 1.0 : -1.0) * uk / double(k), e * k, 0});
    uk *= u;
  }
  return PowerLogSeries(std::move(t));
}

// (1 + u * r^e)^-2 expanded to n terms
inline PowerLogSeries inv_square_power_series(double u, double e, int n) {
  std::vector<PowerLogTerm> t;
  t.reserve(std::size_t(n));
  double uk = 1.0;
  for (int k = 0; k < n; ++k) {
    t.push_back({(k % 2 ? -1.0 : 1.0) * double(k + 1) * uk, e * k, 0});
    uk *= u;
  }
  return PowerLogSeries(std::move(t));
}

// (1 + u * r^e)^p expanded to n terms (binomial series)
inline PowerLogSeries binomial_power_series(double p, double u, double e, int n) {
  std::vector<PowerLogTerm> t;
  double c = 1.0, uk = 1.0;
  for (int k = 0; k < n; ++k) {
    t.push_back({c * uk, e * k, 0});
    c *= (p - k) / double(k + 1);
    uk *= u;
  }
  return PowerLogSeries(std::move(t));
}

// log of a decaying series, valid for r >= r_ref. The dominant term at
// infinity must be a positive pure power; the rest enters through an
// adaptive log(1+u) expansion.
inline PowerLogSeries log_of_series_tail(const PowerLogSeries& f, double r_ref) {
  if (f.empty()) throw std::domain_error("log of empty series");
  const PowerLogTerm* lead = nullptr;
  for (const auto& t : f.terms())
    if (!lead || t.expo > lead->expo) lead = &t;
  if (lead->logpow != 0 || lead->coef <= 0.0)
    throw std::domain_error("series lead term unsuitable for log expansion");

  PowerLogSeries u;  // f / lead - 1
  for (const auto& t : f.terms()) {
    if (&t == lead) continue;
    u.add_term(t.coef / lead->coef, t.expo - lead->expo, t.logpow);
  }
  u = PowerLogSeries(u.terms());
  const double u0 = std::abs(u.eval(r_ref));
  if (u0 > 0.75) throw std::domain_error("log expansion of series tail does not converge");

  PowerLogSeries out;
  out.add_term(std::log(lead->coef), 0.0, 0);
  if (lead->expo != 0.0) out.add_term(lead->expo, 0.0, 1);
  PowerLogSeries upow = u;
  double mag = u0;
  for (int m = 1; m <= 80 && mag / m > 1e-17; ++m) {
    out += upow * ((m % 2 ? 1.0 : -1.0) / double(m));
    upow = (upow * u).pruned(r_ref, 1e-17);
    mag *= u0;
  }
  return PowerLogSeries(out.terms());
}

}  // namespace logfe
