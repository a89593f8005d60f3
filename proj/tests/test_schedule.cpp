#include "doctest.h"

#include <cmath>

#include "schedule.hpp"

using namespace oulab;

namespace {

CoefficientSchedule make_constant(double f, double g, double T = 1.0) {
  return CoefficientSchedule(Schedule::constant(f, T), Schedule::constant(g, T));
}

// VP-style pair: f = beta/2 (linear), g = sqrt(beta) with beta = 0.1 + 0.9 t,
// so g^2/(2f) is identically 1.
CoefficientSchedule make_vp(double T = 1.0) {
  return CoefficientSchedule(Schedule::linear(0.05, 0.45, T),
                             Schedule::sqrt_polynomial({0.1, 0.9}, T));
}

}  // namespace

TEST_CASE("schedule evaluation per kind") {
  auto s = make_constant(1.0, 1.0);
  auto [f, g] = eval_coeffs(s, 0.5);
  CHECK(f == 1.0);
  CHECK(g == 1.0);

  Schedule lin = Schedule::linear(1.0, 1.0, 2.0);
  CHECK(lin(1.0) == 2.0);

  Schedule tab = Schedule::tabulated({0.0, 1.0}, {1.0, 3.0}, 1.0);
  CHECK(tab(0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(tab(0.0) == 1.0);
  CHECK(tab(1.0) == 3.0);

  Schedule poly = Schedule::polynomial({1.0, 0.0, 2.0}, 1.0);
  CHECK(poly(0.5) == doctest::Approx(1.5).epsilon(1e-15));

  Schedule sq = Schedule::sqrt_polynomial({0.25, 0.75}, 1.0);
  CHECK(sq(1.0) == 1.0);
  CHECK(sq.squared(1.0) == 1.0);
  CHECK(sq.squared(0.0) == 0.25);
}

TEST_CASE("schedule domain errors") {
  Schedule s = Schedule::constant(1.0, 1.0);
  CHECK_THROWS_AS(s(-0.1), std::domain_error);
  CHECK_THROWS_AS(s(1.1), std::domain_error);
}

TEST_CASE("piecewise-constant is left-continuous and matches constants per piece") {
  Schedule pc = Schedule::piecewise_constant({2.0, 5.0}, {0.5}, 1.0);
  CHECK(pc(0.0) == 2.0);
  CHECK(pc(0.5) == 2.0);  // value at the break belongs to the left piece
  CHECK(pc(0.500001) == 5.0);
  CHECK(pc(1.0) == 5.0);

  // reproduces constant-schedule results exactly on each piece
  Schedule c1 = Schedule::constant(2.0, 1.0);
  for (double t : {0.0, 0.1, 0.3, 0.5}) CHECK(pc(t) == c1(t));
}

TEST_CASE("coefficient positivity enforced") {
  CHECK_THROWS_AS(
      CoefficientSchedule(Schedule::constant(-0.1, 1.0), Schedule::constant(1.0, 1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      CoefficientSchedule(Schedule::constant(1.0, 1.0), Schedule::constant(0.0, 1.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(
      CoefficientSchedule(Schedule::linear(0.5, -1.0, 1.0), Schedule::constant(1.0, 1.0)),
      std::invalid_argument);
  // f == 0 is the allowed special case
  CHECK_NOTHROW(make_constant(0.0, 1.0));
  CHECK(make_constant(0.0, 1.0).f_is_zero());
  CHECK_FALSE(make_constant(1.0, 1.0).f_is_zero());
}

TEST_CASE("condition (f - g^2/2c >= 0) checker") {
  auto s = make_constant(1.0, 1.0);
  auto r1 = check_condition(s, WeightParam::weighted(0.5));
  CHECK(r1.holds);
  CHECK(r1.min_slack == doctest::Approx(0.0).epsilon(1e-14));

  auto r2 = check_condition(s, WeightParam::weighted(0.4));
  CHECK_FALSE(r2.holds);
  CHECK(r2.min_slack == doctest::Approx(-0.25).epsilon(1e-12));

  auto z = make_constant(0.0, 1.0);
  for (double c : {0.1, 1.0, 100.0})
    CHECK_FALSE(check_condition(z, WeightParam::weighted(c)).holds);
  // but the declared unweighted regime accepts f == 0
  CHECK(check_condition(z, WeightParam::unit()).holds);
}

TEST_CASE("minimal admissible c") {
  CHECK(minimal_c(make_constant(1.0, 1.0)) == 0.5);

  // VP ratio is identically one, bit-exactly, because g^2 is stored as the
  // polynomial itself
  CHECK(minimal_c(make_vp()) == 1.0);

  auto s = CoefficientSchedule(Schedule::linear(1.0, 1.0, 1.0),
                               Schedule::constant(1.0, 1.0));
  CHECK(minimal_c(s) == 0.5);  // attained at t = 0

  CHECK(std::isinf(minimal_c(make_constant(0.0, 1.0))));
}

TEST_CASE("minimal_c splits admissibility (bisection property)") {
  for (const auto& s : {make_constant(1.0, 1.0), make_vp(),
                        CoefficientSchedule(Schedule::linear(1.0, 1.0, 1.0),
                                            Schedule::constant(1.0, 1.0))}) {
    double cstar = minimal_c(s);
    CHECK(check_condition(s, WeightParam::weighted(cstar)).holds);
    CHECK(check_condition(s, WeightParam::weighted(cstar * (1.0 + 1e-6))).holds);
    CHECK_FALSE(check_condition(s, WeightParam::weighted(cstar * (1.0 - 2e-6))).holds);

    // bisection converges back to cstar
    double lo = cstar / 4, hi = cstar * 4;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (check_condition(s, WeightParam::weighted(mid)).holds) hi = mid;
      else lo = mid;
    }
    CHECK(hi == doctest::Approx(cstar).epsilon(1e-6));
  }
}

TEST_CASE("constants report") {
  // f = 1, g = sqrt(2), c = 1, d = 1
  auto s = make_constant(1.0, std::sqrt(2.0));
  auto r = constants_report(s, WeightParam::weighted(1.0), 1);
  CHECK(r.valid);
  CHECK(r.M_f == 1.0);
  CHECK(r.M_d == 1.0);
  CHECK(r.alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.K_A2 == 1.0);
  // K_A4 = c f M_d^2 + |g^2/2 - c f| M_d = 1 + 0
  CHECK(r.K_A4 == doctest::Approx(1.0).epsilon(1e-12));
  // K_A3 = alpha (1 + d/c) + d (f - g^2/(2c)) = 0.5 * 2 + 0 = 1; the
  // stationary Gaussian sits exactly on this bound (see operator tests)
  CHECK(r.K_A3 == doctest::Approx(1.0).epsilon(1e-12));

  auto r2 = constants_report(make_constant(1.0, 1.0), WeightParam::weighted(0.5), 2);
  CHECK(r2.M_d == 4.0);  // d/c = 4

  auto bad = constants_report(make_constant(1.0, 2.0), WeightParam::weighted(0.5), 1);
  CHECK_FALSE(bad.valid);

  // unweighted regime: M_d = 1, K_A2 = 0, K_A3 = alpha
  auto rz = constants_report(make_constant(0.0, 1.0), WeightParam::unit(), 2);
  CHECK(rz.valid);
  CHECK(rz.M_d == 1.0);
  CHECK(rz.K_A2 == 0.0);
  CHECK(rz.K_A3 == doctest::Approx(rz.alpha).epsilon(1e-12));
}

TEST_CASE("constants monotone under pointwise increase of f") {
  auto r1 = constants_report(make_constant(1.0, 1.0), WeightParam::weighted(1.0), 1);
  auto r2 = constants_report(make_constant(1.5, 1.0), WeightParam::weighted(1.0), 1);
  CHECK(r2.M_f >= r1.M_f);
  CHECK(r2.K_A2 >= r1.K_A2);

  auto lin1 = CoefficientSchedule(Schedule::linear(1.0, 0.5, 1.0),
                                  Schedule::constant(1.0, 1.0));
  auto lin2 = CoefficientSchedule(Schedule::linear(1.2, 0.7, 1.0),
                                  Schedule::constant(1.0, 1.0));
  auto q1 = constants_report(lin1, WeightParam::weighted(1.0), 1);
  auto q2 = constants_report(lin2, WeightParam::weighted(1.0), 1);
  CHECK(q2.M_f >= q1.M_f);
  CHECK(q2.K_A2 >= q1.K_A2);
}

TEST_CASE("K_A4 uses the dominating absolute-value form") {
  // g^2/2 < c f: the signed form would subtract; the absolute value keeps the
  // bound above c f M_d^2
  auto s = make_constant(2.0, 1.0);
  auto r = constants_report(s, WeightParam::weighted(1.0), 1);
  CHECK(r.K_A4 == doctest::Approx(2.0 + 1.5).epsilon(1e-12));
  CHECK(r.K_A4 >= 0.0);
}
