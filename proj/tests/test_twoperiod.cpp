#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "eislab/core/error.hpp"
#include "eislab/twoperiod/two_period.hpp"
#include "support.hpp"

using namespace eislab;
using namespace testsupport;

namespace {

// First-period demand of the CES problem written out by hand.
double ces_c1(double beta, double psi, double e1, double e2, double rf, double rho = 1.0) {
  const double W = e1 + e2 / rf;
  return W / (1.0 + std::pow(beta / (1.0 - beta), psi) * std::pow(rho * rf, psi - 1.0));
}

TwoPeriodProblem problem(double beta, double psi, double e1, double e2, double rf, double rho = 1.0) {
  TwoPeriodProblem p;
  p.e1 = e1;
  p.e2 = e2;
  p.rf = rf;
  p.rho = rho;
  p.aggregator = Aggregator::epstein_zin(beta, psi);
  return p;
}

}  // namespace

TEST_CASE("worked examples of first-period demand") {
  const TwoPeriodSolution a = solve_two_period(problem(0.5, 2.0, 1.0, 0.0, 1.5));
  CHECK(a.closed_form);
  CHECK(a.c1 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(a.c2 == doctest::Approx(0.9).epsilon(1e-14));
  const TwoPeriodSolution b = solve_two_period(problem(0.5, 0.5, 1.0, 0.0, 1.5));
  CHECK(b.c1 == doctest::Approx(1.0 / (1.0 + 1.0 / std::sqrt(1.5))).epsilon(1e-14));
  CHECK(b.c1 == doctest::Approx(0.5505).epsilon(1e-4));
  const TwoPeriodSolution c = solve_two_period(problem(0.5, 1.0, 1.0, 0.0, 1.5));
  CHECK(c.c1 == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("closed form agrees with the hand-written demand and the numeric route") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double beta = 0.3 + 0.6 * U(rng), psi = std::exp(std::log(0.2) + U(rng) * std::log(25.0));
    const double e1 = 0.5 + 1.5 * U(rng), e2 = U(rng), rf = 0.8 + 0.8 * U(rng), rho = 0.5 + U(rng);
    const TwoPeriodProblem p = problem(beta, psi, e1, e2, rf, rho);
    const double oracle = ces_c1(beta, psi, e1, e2, rf, rho);
    CHECK(rel_diff(solve_two_period(p).c1, oracle) < 1e-12);
    CHECK(rel_diff(solve_two_period_numeric(p).c1, oracle) < 1e-8);
  }
}

TEST_CASE("custom aggregators take the numeric route") {
  TwoPeriodProblem p = problem(0.6, 1.7, 1.0, 0.3, 1.2);
  p.aggregator = Aggregator::custom(std::make_shared<OpaqueCes>(0.6, 1.7));
  const TwoPeriodSolution s = solve_two_period(p);
  CHECK_FALSE(s.closed_form);
  CHECK(rel_diff(s.c1, ces_c1(0.6, 1.7, 1.0, 0.3, 1.2)) < 1e-8);
  // A monotone transformation leaves demand unchanged.
  p.aggregator = Aggregator::custom(std::make_shared<LogCes>(0.6, 1.7));
  CHECK(rel_diff(solve_two_period(p).c1, ces_c1(0.6, 1.7, 1.0, 0.3, 1.2)) < 1e-8);
}

TEST_CASE("invalid problems are rejected") {
  CHECK_THROWS_AS(check_problem(problem(0.5, 1.0, -1.0, 0.0, 1.0)), PreconditionError);
  CHECK_THROWS_AS(check_problem(problem(0.5, 1.0, 1.0, 0.0, 0.0)), PreconditionError);
  CHECK_THROWS_AS(check_problem(problem(0.5, 1.0, 1.0, 0.0, 1.0, 0.0)), PreconditionError);
  CHECK_THROWS_AS(check_problem(problem(0.5, 1.0, 0.0, 0.0, 1.0)), PreconditionError);
}

TEST_CASE("response signs") {
  SUBCASE("without second-period income epsilon is one") {
    for (double psi : {0.5, 2.0}) {
      const TwoPeriodSigns s = two_period_signs(problem(0.5, psi, 1.0, 0.0, 1.25));
      CHECK(s.epsilon == doctest::Approx(1.0).epsilon(1e-12));
      const int expected = psi < 1.0 ? 1 : -1;
      CHECK(s.dc_drf_sign == expected);
      CHECK(s.dc_drho_sign == expected);
      CHECK(s.rf_agrees);
      CHECK(s.rho_agrees);
      // Oracle: derivative of the hand-written demand.
      const double h = 1e-6;
      const double d = (ces_c1(0.5, psi, 1.0, 0.0, 1.25 + h) - ces_c1(0.5, psi, 1.0, 0.0, 1.25 - h)) / (2 * h);
      CHECK(s.dc_drf == doctest::Approx(d).epsilon(1e-6));
    }
  }
  SUBCASE("unit EIS without income leaves demand unchanged") {
    const TwoPeriodSigns s = two_period_signs(problem(0.5, 1.0, 1.0, 0.0, 1.5));
    CHECK(std::abs(s.dc_drf) < 1e-12);
    CHECK(s.dc_drf_sign == 0);
  }
  SUBCASE("second-period income changes the threshold") {
    // beta = .5, psi = 1, e1 = 2, e2 = 1, rf = 1: c1 = 1.5 and epsilon = 3.
    const TwoPeriodSigns s = two_period_signs(problem(0.5, 1.0, 2.0, 1.0, 1.0));
    CHECK(s.epsilon == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(s.dc_drf_sign == -1);
    CHECK(s.dc_drf == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(s.rf_agrees);
  }
  SUBCASE("epsilon undefined when nothing is saved") {
    CHECK_THROWS_AS(two_period_signs(problem(0.5, 1.0, 1.0, 1.0, 1.0)), PreconditionError);
  }
}

TEST_CASE("figure curves") {
  const auto start = std::chrono::steady_clock::now();
  const Figure1Data d = figure1_data(0.5, {0.5, 1.0, 2.0}, {1.0, 1.25, 1.5}, 50);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 1.0);
  REQUIRE(d.optima.size() == 9);
  auto c1 = [&](double psi, double rf) {
    for (const auto& o : d.optima)
      if (o.psi == psi && o.rf == rf) return o.c1;
    FAIL("missing optimum");
    return 0.0;
  };
  CHECK(std::abs(c1(1.0, 1.0) - c1(1.0, 1.5)) < 1e-10);
  CHECK(std::abs(c1(1.0, 1.25) - c1(1.0, 1.5)) < 1e-10);
  CHECK(c1(0.5, 1.0) < c1(0.5, 1.25));
  CHECK(c1(0.5, 1.25) < c1(0.5, 1.5));
  CHECK(c1(2.0, 1.0) > c1(2.0, 1.25));
  CHECK(c1(2.0, 1.25) > c1(2.0, 1.5));
  for (const auto& o : d.optima) {
    CHECK(o.c1 + o.c2 / o.rf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rel_diff(o.c1, ces_c1(0.5, o.psi, 1.0, 0.0, o.rf)) < 1e-12);
  }
  CHECK_FALSE(d.rows.empty());
}
