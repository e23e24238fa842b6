#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eislab/core/aggregator.hpp"
#include "eislab/core/certainty_equivalent.hpp"
#include "eislab/core/distribution.hpp"
#include "eislab/core/environment.hpp"
#include "eislab/core/error.hpp"
#include "eislab/core/quadrature.hpp"
#include "eislab/core/setting.hpp"
#include "eislab/core/validate.hpp"
#include "support.hpp"

using namespace eislab;
using namespace testsupport;

namespace {

// Central differences of f.value, the oracle for analytic partials.
AggregatorPoint fd_partials(const Aggregator& f, double c, double v) {
  const double hc = 1e-4 * c, hv = 1e-4 * v;
  auto F = [&](double x, double y) { return f.value(x, y); };
  AggregatorPoint p;
  p.f = F(c, v);
  p.fc = (F(c + hc, v) - F(c - hc, v)) / (2 * hc);
  p.fv = (F(c, v + hv) - F(c, v - hv)) / (2 * hv);
  p.fcc = (F(c + hc, v) - 2 * p.f + F(c - hc, v)) / (hc * hc);
  p.fvv = (F(c, v + hv) - 2 * p.f + F(c, v - hv)) / (hv * hv);
  p.fcv = (F(c + hc, v + hv) - F(c + hc, v - hv) - F(c - hc, v + hv) + F(c - hc, v - hv)) / (4 * hc * hv);
  return p;
}

void check_partials(const Aggregator& f, double c, double v) {
  const AggregatorPoint a = f.evaluate(c, v);
  const AggregatorPoint n = fd_partials(f, c, v);
  CHECK(a.f == doctest::Approx(n.f).epsilon(1e-12));
  CHECK(a.fc == doctest::Approx(n.fc).epsilon(1e-6));
  CHECK(a.fv == doctest::Approx(n.fv).epsilon(1e-6));
  CHECK(a.fcc == doctest::Approx(n.fcc).epsilon(1e-4));
  CHECK(a.fvv == doctest::Approx(n.fvv).epsilon(1e-4));
  CHECK(a.fcv == doctest::Approx(n.fcv).epsilon(1e-4));
}

}  // namespace

TEST_CASE("Epstein-Zin aggregator matches the CES formula and its limit") {
  const double beta = 0.6, c = 0.7, v = 1.3;
  for (double psi : {0.3, 0.5, 2.0, 4.0}) {
    const double r = 1.0 - 1.0 / psi;
    const double expected = std::pow((1 - beta) * std::pow(c, r) + beta * std::pow(v, r), 1.0 / r);
    CHECK(Aggregator::epstein_zin(beta, psi).value(c, v) == doctest::Approx(expected).epsilon(1e-14));
  }
  const double cd = std::pow(c, 1 - beta) * std::pow(v, beta);
  CHECK(Aggregator::epstein_zin(beta, 1.0).family() == AggregatorFamily::CobbDouglas);
  CHECK(Aggregator::cobb_douglas(beta).value(c, v) == doctest::Approx(cd).epsilon(1e-14));
  // Continuity of the CES family at psi = 1.
  CHECK(Aggregator::epstein_zin(beta, 1.0 + 1e-7).value(c, v) == doctest::Approx(cd).epsilon(1e-6));
}

TEST_CASE("analytic partials agree with finite differences") {
  for (double psi : {0.4, 1.0, 2.5}) check_partials(Aggregator::epstein_zin(0.7, psi), 0.8, 1.7);
  check_partials(Aggregator::epstein_zin(0.5, 0.5).devalued(1.3), 0.5, 0.9);
  check_partials(Aggregator::custom(std::make_shared<OpaqueCes>(0.4, 3.0)), 1.1, 0.6);
}

TEST_CASE("homogeneous aggregators pass the sampled Euler and monotonicity checks") {
  for (double psi : {0.25, 1.0, 3.0}) {
    const AggregatorCheck k = check_aggregator(Aggregator::epstein_zin(0.8, psi));
    CHECK(k.increasing);
    CHECK(k.homogeneity);
    CHECK(k.euler);
    CHECK(k.worst_euler_residual < 1e-8);
  }
  // A model that claims homogeneity but is not homogeneous is caught.
  class Misdeclared final : public AggregatorModel {
   public:
    AggregatorPoint evaluate(double c, double v) const override { return inner_.evaluate(c, v); }
    bool homogeneous_degree_one() const override { return true; }
    bool inada() const override { return true; }

   private:
    LogCes inner_{0.5, 2.0};
  };
  const AggregatorCheck bad = check_aggregator(Aggregator::custom(std::make_shared<Misdeclared>()));
  CHECK(bad.increasing);
  CHECK_FALSE(bad.homogeneity);
  CHECK_FALSE(bad.euler);
}

TEST_CASE("local EIS from second-order partials equals psi") {
  for (double psi : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    const Aggregator f = Aggregator::epstein_zin(0.55, psi);
    CHECK(local_eis(f.evaluate(0.3, 2.0), 0.3, 2.0) == doctest::Approx(psi).epsilon(1e-10));
  }
}

TEST_CASE("invalid aggregator parameters are rejected") {
  CHECK_THROWS_AS(Aggregator::epstein_zin(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(Aggregator::epstein_zin(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(Aggregator::cobb_douglas(0.0), DomainError);
  CHECK_THROWS_AS(Aggregator::epstein_zin(0.5, 2.0).value(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Aggregator::epstein_zin(0.5, 2.0).devalued(0.9), DomainError);
}

TEST_CASE("CRRA certainty equivalent") {
  const std::vector<double> u{1.0, 2.0}, p{0.5, 0.5};
  CHECK(crra(2.0).evaluate(u, p) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  // Brute-force expectation for a few curvatures.
  for (double g : {0.0, 0.5, 1.0, 3.0}) {
    double expected;
    if (g == 1.0) {
      expected = std::exp(0.5 * std::log(1.0) + 0.5 * std::log(2.0));
    } else {
      expected = std::pow(0.5 * std::pow(1.0, 1 - g) + 0.5 * std::pow(2.0, 1 - g), 1 / (1 - g));
    }
    CHECK(crra(g).evaluate(u, p) == doctest::Approx(expected).epsilon(1e-13));
  }
  // Log branch selected by continuity threshold.
  CHECK(crra(1.0 + 1e-11).evaluate(u, p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // Certainty equivalence and range.
  const std::vector<double> same{1.7, 1.7};
  CHECK(crra(5.0).evaluate(same, p) == 1.7);
  const std::vector<double> w{0.5, 1.0, 4.0}, q{0.2, 0.5, 0.3};
  const double m = crra(2.5).evaluate(w, q);
  CHECK(m > 0.5);
  CHECK(m < 4.0);
}

TEST_CASE("certainty equivalent domain and dimension errors") {
  const std::vector<double> u{0.0, 1.0}, p{0.5, 0.5}, p3{0.2, 0.3, 0.5};
  CHECK_THROWS_AS(crra(2.0).evaluate(u, p), DomainError);
  CHECK(crra(0.5).evaluate(u, p) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(crra(2.0).evaluate(u, p3), DimensionError);
  const std::vector<double> neg{-1.0, 1.0};
  CHECK_THROWS_AS(crra(0.5).evaluate(neg, p), DomainError);
  const auto mp = CertaintyEquivalent::multi_prior(Curvature::crra(2.0), {{0.5, 0.5}});
  CHECK_THROWS_AS(mp.evaluate(std::vector<double>{1.0, 2.0, 3.0}, p3), DimensionError);
}

TEST_CASE("ambiguity certainty equivalents reduce to the quasi-arithmetic mean") {
  const std::vector<double> u{0.8, 1.5, 2.2}, p{0.3, 0.3, 0.4};
  const double qa = crra(3.0).evaluate(u, p);
  const auto mp = CertaintyEquivalent::multi_prior(Curvature::crra(3.0), {p});
  CHECK(mp.evaluate(u, p) == doctest::Approx(qa).epsilon(1e-14));
  const auto sa = CertaintyEquivalent::smooth_ambiguity(Curvature::crra(3.0), Curvature::crra(7.0), {1.0}, {p});
  CHECK(sa.evaluate(u, p) == doctest::Approx(qa).epsilon(1e-13));
  // Multi-prior takes the worst prior.
  const std::vector<double> p2{0.6, 0.3, 0.1};
  const auto mp2 = CertaintyEquivalent::multi_prior(Curvature::crra(3.0), {p, p2});
  CHECK(mp2.evaluate(u, p) == doctest::Approx(std::min(qa, crra(3.0).evaluate(u, p2))).epsilon(1e-14));
  // Smooth ambiguity with two priors: direct evaluation of the nested means.
  const auto sa2 = CertaintyEquivalent::smooth_ambiguity(Curvature::crra(2.0), Curvature::crra(4.0), {0.5, 0.5}, {p, p2});
  const double m1 = crra(2.0).evaluate(u, p), m2 = crra(2.0).evaluate(u, p2);
  const double expected = std::pow(0.5 * std::pow(m1, -3.0) + 0.5 * std::pow(m2, -3.0), -1.0 / 3.0);
  CHECK(sa2.evaluate(u, p) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("certainty equivalents are monotone and averse to mean-preserving spreads") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  const std::vector<CertaintyEquivalent> ces{
      crra(0.0), crra(2.0), CertaintyEquivalent::quasi_arithmetic(Curvature::cara(1.5)),
      CertaintyEquivalent::smooth_ambiguity(Curvature::crra(2.0), Curvature::crra(5.0), {0.4, 0.6},
                                            {{0.25, 0.25, 0.5}, {0.5, 0.25, 0.25}}),
      CertaintyEquivalent::multi_prior(Curvature::crra(2.0), {{0.25, 0.25, 0.5}, {0.5, 0.25, 0.25}})};
  const std::vector<double> p{0.25, 0.25, 0.5};
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a{U(rng), U(rng), U(rng)}, b = a;
    b[it % 3] += 0.5 * U(rng);
    for (const auto& ce : ces) CHECK(ce.evaluate(a, p) <= ce.evaluate(b, p) + 1e-14);
  }
  // Mean-preserving spread of a two-point distribution.
  const std::vector<double> pp{0.5, 0.5};
  const std::vector<double> narrow{1.0, 2.0}, wide{0.8, 2.2};
  for (double g : {0.5, 2.0, 6.0}) CHECK(crra(g).evaluate(wide, pp) < crra(g).evaluate(narrow, pp));
}

TEST_CASE("stochastic dominance checks") {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> a{1.0, 2.0}, down{0.9, 1.8}, spread{0.8, 2.2};
  CHECK(fosd_dominates(a, p, down, p));
  CHECK_FALSE(fosd_dominates(down, p, a, p));
  CHECK(sosd_dominates(a, p, spread, p));
  CHECK_FALSE(fosd_dominates(a, p, spread, p));
  CHECK_FALSE(sosd_dominates(spread, p, a, p));
  CHECK(mean(a, p) == doctest::Approx(mean(spread, p)).epsilon(1e-15));
  CHECK(probability_problem(std::vector<double>{0.3, 0.7}).empty());
  CHECK_FALSE(probability_problem(std::vector<double>{0.3, 0.6}).empty());
  CHECK_FALSE(probability_problem(std::vector<double>{-0.1, 1.1}).empty());
}

TEST_CASE("regularity report") {
  const Setting s = portfolio_setting(3, 0.9, 0.5, 2.0);
  const RegularityReport r = validate_setting(s);
  CHECK(r.strongly_regular);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name);

  Setting bad = s;
  bad.terminal.intercept = 1.0;
  const RegularityReport rb = validate_setting(bad);
  CHECK_FALSE(rb.strongly_regular);
  CHECK_FALSE(rb.passed("terminal_normalized"));

  // A custom aggregator without the Inada flag triggers the interiority warning.
  class NoInada final : public AggregatorModel {
   public:
    AggregatorPoint evaluate(double c, double v) const override { return inner_.evaluate(c, v); }
    bool homogeneous_degree_one() const override { return true; }
    bool inada() const override { return false; }

   private:
    OpaqueCes inner_{0.5, 2.0};
  };
  Setting w = s;
  for (auto& p : w.periods) p.aggregator = Aggregator::custom(std::make_shared<NoInada>());
  const RegularityReport rw = validate_setting(w);
  const RegularityCheck* inada = rw.find("aggregator_inada");
  REQUIRE(inada != nullptr);
  CHECK_FALSE(inada->passed);
  CHECK(inada->severity == Severity::Warning);
}

TEST_CASE("setting invariants are enforced") {
  Setting s = portfolio_setting(2, 0.9, 0.5, 2.0);
  CHECK_NOTHROW(check_setting(s));
  Setting neg = s;
  neg.periods[0].next.returns[1][0] = -0.1;
  CHECK_THROWS_AS(check_setting(neg), PreconditionError);
  Setting probs = s;
  probs.periods[1].next.probs = {0.2, 0.3, 0.3, 0.1};
  CHECK_THROWS_AS(check_setting(probs), PreconditionError);
  Setting dims = s;
  dims.periods[0].next.returns[0].pop_back();
  CHECK_THROWS_AS(check_setting(dims), PreconditionError);
  Setting inc = income_setting(2, 0.9, 0.5, 2.0);
  CHECK_NOTHROW(check_setting(inc));
  inc.periods[0].next.income->transitory[0] = 0.0;
  CHECK_THROWS_AS(check_setting(inc), PreconditionError);
}

TEST_CASE("shock path combination rule") {
  ShockPath path{Setting{}, Setting{}, 0.0, 1.0};
  ContinuationPoint p0{1.0, 0.5, -0.1, 0.0, 0.0}, p1{2.0, 0.8, -0.2, 0.0, 0.0};
  const ContinuationPoint a = path.combine(p0, p1, 0.0);
  CHECK(a.v == 1.0);
  CHECK(a.v_alpha == doctest::Approx(1.0));
  CHECK(a.v_walpha == doctest::Approx(0.3));
  const ContinuationPoint m = path.combine(p0, p1, 0.25);
  CHECK(m.v == doctest::Approx(1.25));
  CHECK(m.v_w == doctest::Approx(0.575));
  CHECK_THROWS_AS(path.combine(p0, p1, 1.5), DomainError);
}

TEST_CASE("Gauss-Hermite nodes") {
  const DiscreteDistribution z = standard_normal_nodes(7);
  double m1 = 0, m2 = 0, m4 = 0, total = 0;
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    total += z.probs[i];
    m1 += z.probs[i] * z.values[i];
    m2 += z.probs[i] * z.values[i] * z.values[i];
    m4 += z.probs[i] * std::pow(z.values[i], 4);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(m1) < 1e-14);
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  const DiscreteDistribution ln = lognormal_nodes(0.0, 0.3, 5, true);
  CHECK(mean(ln.values, ln.probs) == doctest::Approx(1.0).epsilon(1e-14));
  const DiscreteDistribution raw = lognormal_nodes(0.05, 0.2, 9);
  CHECK(mean(raw.values, raw.probs) == doctest::Approx(std::exp(0.05 + 0.02)).epsilon(1e-10));
}
