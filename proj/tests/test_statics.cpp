#include <doctest.h>

#include <cmath>
#include <random>

#include "eislab/core/error.hpp"
#include "eislab/statics/random_env.hpp"
#include "eislab/statics/statics.hpp"
#include "support.hpp"

using namespace eislab;
using namespace testsupport;

namespace {

// v(s, a) = e^{k a} s.
Environment exp_env(Aggregator f, double k) {
  return homothetic_environment(std::move(f), [k](double a) { return std::pair{std::exp(k * a), k * std::exp(k * a)}; });
}

// Hand-written optimum of max f(c, g (w - c)) for Epstein-Zin f.
double ez_consumption(double beta, double psi, double g, double w) {
  return w / (1.0 + std::pow(beta / (1.0 - beta), psi) * std::pow(g, psi - 1.0));
}

// Two-period problem with second-period income: v(s, a) = a s + e2.
Environment income_env(Aggregator f, double e2) {
  Environment env{std::move(f), [e2](double s, double a) { return ContinuationPoint{a * s + e2, a, 0.0, s, 1.0}; },
                  {}, {}, 0.5, 2.0, false};
  return env;
}

}  // namespace

TEST_CASE("EIS of the built-in and custom aggregators") {
  for (double psi : {0.3, 1.0, 2.0, 4.0}) {
    const Environment env = exp_env(Aggregator::epstein_zin(0.6, psi), 0.5);
    CHECK(compute_eis(env, 1.0, 0.3) == psi);
  }
  // The hand-written CES needs psi != 1.
  for (double psi : {0.3, 0.8, 2.0, 4.0}) {
    const Environment opaque = exp_env(Aggregator::custom(std::make_shared<OpaqueCes>(0.6, psi)), 0.5);
    CHECK(compute_eis(opaque, 1.0, 0.3) == doctest::Approx(psi).epsilon(1e-5));
    // Indifference-curve EIS is invariant to monotone transformations.
    const Aggregator log_ces = Aggregator::custom(std::make_shared<LogCes>(0.6, psi));
    CHECK(indifference_eis(log_ces, 0.7, 1.9) == doctest::Approx(psi).epsilon(1e-5));
    CHECK(indifference_eis(log_ces, 0.7, 1.9) ==
          doctest::Approx(indifference_eis(Aggregator::custom(std::make_shared<OpaqueCes>(0.6, psi)), 0.7, 1.9))
              .epsilon(1e-8));
  }
}

TEST_CASE("relative elasticity of marginal value") {
  for (double psi : {0.5, 2.0}) CHECK(compute_remv(exp_env(Aggregator::epstein_zin(0.5, psi), 1.0), 1.0, 0.2) == 1.0);
  // beta = .5, psi = 1, w = 2, rate 1, e2 = 1: c = 1.5, s = .5, v = 1.5, remv = v / s = 3.
  const Environment env = income_env(Aggregator::cobb_douglas(0.5), 1.0);
  CHECK(optimal_consumption(env, 2.0, 1.0) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(compute_remv(env, 2.0, 1.0) == doctest::Approx(3.0).epsilon(1e-6));
  const Environment flat{Aggregator::cobb_douglas(0.5),
                         [](double s, double) { return ContinuationPoint{s, 1.0, 0.0, 0.0, 0.0}; }, {}, {}, 0.0, 1.0,
                         false};
  CHECK_THROWS_AS(compute_remv(flat, 1.0, 0.5), DomainError);
}

TEST_CASE("consumption response formula against the closed form") {
  const double beta = 0.55, k = 0.8, w = 1.3;
  for (double psi : {0.4, 1.0, 2.5}) {
    const Environment env = exp_env(Aggregator::epstein_zin(beta, psi), k);
    for (double a : {0.1, 0.5, 0.9}) {
      const double h = 1e-5;
      const double exact = (ez_consumption(beta, psi, std::exp(k * (a + h)), w) -
                            ez_consumption(beta, psi, std::exp(k * (a - h)), w)) /
                           (2 * h);
      const ResponseReport r = consumption_response(env, w, a);
      CHECK(r.c == doctest::Approx(ez_consumption(beta, psi, std::exp(k * a), w)).epsilon(1e-10));
      CHECK(std::abs(r.c_alpha - exact) <= 1e-8 * std::max(1.0, std::abs(exact)));
      CHECK(std::abs(r.residual) < 1e-6);
      CHECK(r.eps == doctest::Approx(1.0).epsilon(1e-12));
      if (psi == 1.0) {
        CHECK(std::abs(r.c_alpha) < 1e-10);
        CHECK(r.sign_pred == 0);
      } else {
        CHECK(r.sign_pred == (psi < 1.0 ? 1 : -1));
        CHECK(r.agrees);
      }
    }
  }
}

TEST_CASE("income raises the threshold elasticity") {
  // eps = 3 at the optimum: consumption falls with the rate even at unit EIS.
  const Environment env = income_env(Aggregator::cobb_douglas(0.5), 1.0);
  const ResponseReport r = consumption_response(env, 2.0, 1.0);
  CHECK(r.eps == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(r.sign_pred == -1);
  CHECK(r.sign_obs == -1);
  // c = .5 (w + e2 / a): dc/da = -.5 e2 / a^2.
  CHECK(r.c_alpha == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("sign rule on random environments") {
  std::mt19937_64 rng(5);
  int asserted = 0;
  for (int i = 0; i < 200; ++i) {
    const RandomEnvironment e = random_environment(rng);
    const ResponseReport r = consumption_response(e.env, e.w, e.alpha);
    CHECK(r.concave);
    CHECK(std::abs(r.residual) < 1e-6);
    if (r.asserted) {
      ++asserted;
      CHECK_MESSAGE(r.agrees, e.description);
    }
  }
  CHECK(asserted > 150);
}

TEST_CASE("integrated response over a finite shock") {
  const double beta = 0.6, k = 1.0, w = 2.0;
  for (double psi : {0.5, 2.0}) {
    const Environment env = exp_env(Aggregator::epstein_zin(beta, psi), k);
    const DiscreteResponse d = discrete_response(env, w, 0.0, 1.0);
    const double exact = ez_consumption(beta, psi, std::exp(k), w) - ez_consumption(beta, psi, 1.0, w);
    CHECK(d.agrees);
    CHECK(d.direct == doctest::Approx(exact).epsilon(1e-8));
    CHECK(std::abs(d.integral - exact) < 1e-6);
  }
  Environment kinked = exp_env(Aggregator::epstein_zin(beta, 2.0), k);
  kinked.smooth_at = [](double, double a) { return a < 0.5; };
  CHECK_THROWS_AS(discrete_response(kinked, w, 0.0, 1.0), PreconditionError);
}

TEST_CASE("monotonicity certificate") {
  CertificateOptions opt;
  opt.margin = 0.1;
  for (double psi : {0.5, 2.0}) {
    const Environment env = exp_env(Aggregator::epstein_zin(0.5, psi), 1.0);
    // Box around the optimal shares 1 / (1 + e^{a (psi - 1)}) for a in [0, 1].
    opt.share = psi < 1.0 ? Box{0.45, 0.65} : Box{0.25, 0.55};
    const Certificate c = monotone_condition(env, {0.5, 2.0}, {0.0, 1.0}, opt);
    CHECK(c.verdict == (psi < 1.0 ? Certificate::Verdict::Below : Certificate::Verdict::Above));
    CHECK(c.margin >= 0.1);
    CHECK(c.violations == 0);
    CHECK(c.comparisons > 0);
    CHECK(c.homothetic);
    CHECK(c.outside_box == 0);
    // Oracle: the closed-form demand moves in the certified direction.
    for (double a = 0.0; a < 1.0; a += 0.1) {
      const double d = ez_consumption(0.5, psi, std::exp(a + 0.1), 1.0) - ez_consumption(0.5, psi, std::exp(a), 1.0);
      CHECK((c.verdict == Certificate::Verdict::Below ? d > 0.0 : d < 0.0));
    }
  }
  // Over the whole share range the homothetic condition changes sides.
  opt.share = Box{0.01, 0.99};
  CHECK(monotone_condition(exp_env(Aggregator::epstein_zin(0.5, 0.5), 1.0), {0.5, 2.0}, {0.0, 1.0}, opt).verdict ==
        Certificate::Verdict::Mixed);
  // Unit EIS sits on the boundary and cannot be certified with a margin.
  const Certificate one = monotone_condition(exp_env(Aggregator::cobb_douglas(0.5), 1.0), {0.5, 2.0}, {0.0, 1.0}, opt);
  CHECK(one.verdict == Certificate::Verdict::Mixed);
  CHECK_THROWS_AS(monotone_condition(exp_env(Aggregator::cobb_douglas(0.5), 1.0), {0.5, 2.0}, {0.0, 2.0}, opt),
                  PreconditionError);
}
