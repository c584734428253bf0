#include <doctest.h>

#include <cmath>

#include "logfe/series.hpp"
#include "oracle.hpp"

using logfe::PowerLogSeries;
using testutil::simpson;

namespace {

// int_0^X f(r) r dr by substitution r = X e^{-t}; needs leading exponent > -2
double origin_integral_numeric(const PowerLogSeries& f, double X) {
  return simpson([&f, X](double t) {
    const double r = X * std::exp(-t);
    return f.eval(r) * r * r;
  }, 0.0, 60.0, 200000);
}

// int_X^inf f(r) r dr by substitution r = X e^{t}; needs leading exponent < -2
double tail_integral_numeric(const PowerLogSeries& f, double X) {
  return simpson([&f, X](double t) {
    const double r = X * std::exp(t);
    return f.eval(r) * r * r;
  }, 0.0, 200.0, 400000);
}

}  // namespace

TEST_SUITE("series") {

TEST_CASE("evaluation and arithmetic") {
  auto s = PowerLogSeries::constant(2.0) + PowerLogSeries::monomial(3.0, -2.0, 1);
  const double r = 1.7;
  CHECK(s.eval(r) == doctest::Approx(2.0 + 3.0 * std::pow(r, -2.0) * std::log(r)).epsilon(1e-14));

  auto p = s * PowerLogSeries::monomial(5.0, -4.0);
  CHECK(p.eval(r) == doctest::Approx(5.0 * std::pow(r, -4.0) * s.eval(r)).epsilon(1e-14));

  auto sc = s * (-0.5);
  CHECK(sc.eval(r) == doctest::Approx(-0.5 * s.eval(r)).epsilon(1e-14));
}

TEST_CASE("duplicate terms merge") {
  PowerLogSeries s({{1.5, -3.0, 1}, {2.5, -3.0, 1}, {0.0, 7.0, 0}});
  CHECK(s.size() == 1);
  CHECK(s.terms()[0].coef == doctest::Approx(4.0));
  CHECK(s.leading_exponent() == doctest::Approx(-3.0));
}

TEST_CASE("origin moments: closed form vs quadrature and hand values") {
  PowerLogSeries f({{1.7, -0.5, 2}, {-0.3, 1.0, 1}});
  const double X = 0.8;
  CHECK(f.integral_origin(X) == doctest::Approx(origin_integral_numeric(f, X)).epsilon(1e-9));

  // int_0^X r log r dr = X^2 (log X)/2 - X^2/4
  auto g = PowerLogSeries::monomial(1.0, 0.0, 1);
  const double X2 = 0.7;
  CHECK(g.integral_origin(X2) ==
        doctest::Approx(X2 * X2 * std::log(X2) / 2.0 - X2 * X2 / 4.0).epsilon(1e-14));

  CHECK_THROWS(PowerLogSeries::monomial(1.0, -2.0).integral_origin(1.0));
  CHECK_THROWS(PowerLogSeries::monomial(1.0, -2.3).integral_origin(1.0));
}

TEST_CASE("tail moments: closed form vs quadrature and hand values") {
  PowerLogSeries f({{1.3, -3.5, 2}, {0.4, -4.0, 1}});
  const double X = 1.6;
  CHECK(f.integral_tail(X) == doctest::Approx(tail_integral_numeric(f, X)).epsilon(1e-9));

  // int_X^inf r^{-3} log r dr = X^{-2} (log X / 2 + 1/4)
  auto g = PowerLogSeries::monomial(1.0, -4.0, 1);
  const double X2 = 2.4;
  CHECK(g.integral_tail(X2) ==
        doctest::Approx((std::log(X2) / 2.0 + 0.25) / (X2 * X2)).epsilon(1e-14));

  CHECK_THROWS(PowerLogSeries::monomial(1.0, -2.0).integral_tail(4.0));
  CHECK_THROWS(PowerLogSeries::monomial(1.0, -1.5).integral_tail(4.0));
}

TEST_CASE("antiderivative handles the logarithmic branch") {
  PowerLogSeries f({{5.0, -2.0, 0}, {1.0, -2.0, 1}});
  auto A = f.antiderivative_rdr();
  const double a = 0.9, b = 7.3;
  const double expect = 5.0 * std::log(b / a) + 0.5 * (std::pow(std::log(b), 2) - std::pow(std::log(a), 2));
  CHECK(A.eval(b) - A.eval(a) == doctest::Approx(expect).epsilon(1e-13));

  // generic exponent, cross-checked by quadrature
  PowerLogSeries g({{2.0, -3.2, 2}});
  auto B = g.antiderivative_rdr();
  const double num = simpson([&g](double r) { return g.eval(r) * r; }, 1.0, 5.0, 20000);
  CHECK(B.eval(5.0) - B.eval(1.0) == doctest::Approx(num).epsilon(1e-10));
}

TEST_CASE("argument transforms") {
  PowerLogSeries s({{1.1, -1.5, 2}, {-0.4, 0.5, 1}, {2.0, 0.0, 0}});
  const double r = 1.9;

  const double lam = 2.7;
  CHECK(s.with_scaled_argument(lam).eval(r) == doctest::Approx(s.eval(lam * r)).epsilon(1e-13));

  const double beta = 4.0 / 3.0;
  CHECK(s.with_power_argument(beta).eval(r) == doctest::Approx(s.eval(std::pow(r, beta))).epsilon(1e-13));
}

TEST_CASE("expansion helpers match their generating functions") {
  const double r = 2.0, u = 0.3, e = -2.0;
  const double x = u * std::pow(r, e);
  CHECK(logfe::log1p_power_series(u, e, 30).eval(r) == doctest::Approx(std::log1p(x)).epsilon(1e-13));
  CHECK(logfe::inv_square_power_series(u, e, 30).eval(r) ==
        doctest::Approx(std::pow(1.0 + x, -2.0)).epsilon(1e-13));
  CHECK(logfe::binomial_power_series(-2.5, u, e, 40).eval(r) ==
        doctest::Approx(std::pow(1.0 + x, -2.5)).epsilon(1e-13));
}

TEST_CASE("log of a decaying series") {
  auto f = PowerLogSeries::monomial(2.0, -4.0) * logfe::inv_square_power_series(0.5, -2.0, 25);
  auto L = logfe::log_of_series_tail(f, 2.0);
  for (double r : {2.0, 3.0, 8.0, 50.0}) {
    const double exact = std::log(2.0 * std::pow(r, -4.0) * std::pow(1.0 + 0.5 / (r * r), -2.0));
    CHECK(L.eval(r) == doctest::Approx(exact).epsilon(1e-10));
  }
  // lead term must be a positive pure power
  CHECK_THROWS(logfe::log_of_series_tail(PowerLogSeries::monomial(-1.0, -4.0), 2.0));
  CHECK_THROWS(logfe::log_of_series_tail(PowerLogSeries(), 2.0));
}

TEST_CASE("pruning keeps the value, shrinks the term count") {
  PowerLogSeries s({{1.0, -4.0, 0}, {1e-25, -4.5, 1}, {3.0, -6.0, 0}});
  auto p = s.pruned(2.0);
  CHECK(p.size() < s.size());
  CHECK(p.eval(2.0) == doctest::Approx(s.eval(2.0)).epsilon(1e-15));
}

}  // TEST_SUITE
