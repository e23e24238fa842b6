#include <doctest.h>

#include <cmath>

#include "eislab/core/error.hpp"
#include "eislab/core/distribution.hpp"
#include "eislab/core/quadrature.hpp"
#include "eislab/shocks/entrepreneur.hpp"
#include "eislab/shocks/shock.hpp"
#include "eislab/shocks/verify.hpp"
#include "eislab/solver/backward.hpp"
#include "eislab/solver/homothetic.hpp"
#include "support.hpp"

using namespace eislab;
using namespace testsupport;

namespace {

EntrepreneurBlock block() {
  EntrepreneurBlock e;
  e.technology = std::make_shared<CobbDouglasTechnology>(0.3);
  e.capital_price = 1.0;
  e.leverage_cap = 0.5;
  e.capital_grid = {0.0, 0.25, 0.5};
  e.leverage_grid = {0.0, 0.5, 1.0};
  e.productivity = {0.65, 0.75};
  e.wage = {0.5, 0.5};
  e.depreciation = {0.05, 0.1};
  e.capital_price_next = {1.0, 1.0};
  e.debt_rate = {0.02, 0.02};
  e.tax = {0.2, 0.2};
  e.financial_returns = {{0.02, 0.02}, {0.0, 0.12}};
  return e;
}

Setting entrepreneur_setting(std::size_t T) {
  Setting s = simple_setting(T, 0.9, 2.0, 3.0, {0.5, 0.5}, {});
  for (auto& p : s.periods) {
    p.next.returns.clear();
    p.next.entrepreneur = block();
  }
  reduce_entrepreneur_blocks(s);
  check_setting(s);
  return s;
}

Setting ambiguity_setting(std::size_t T) {
  Setting s = portfolio_setting(T, 0.9, 2.0, 2.0);
  for (auto& p : s.periods) {
    p.ce = CertaintyEquivalent::smooth_ambiguity(Curvature::crra(2.0), Curvature::crra(4.0), {0.5, 0.5},
                                                 {{0.1, 0.2, 0.4, 0.3}, {0.3, 0.4, 0.2, 0.1}});
  }
  return s;
}

Setting multi_prior_setting(std::size_t T) {
  Setting s = portfolio_setting(T, 0.9, 0.5, 2.0);
  for (auto& p : s.periods) {
    p.ce = CertaintyEquivalent::multi_prior(Curvature::crra(2.0), {{0.2, 0.3, 0.3, 0.2}, {0.25, 0.3, 0.25, 0.2}});
  }
  return s;
}

Setting setting_for(ShockKind k) {
  switch (k) {
    case ShockKind::ConcavifyAmbiguity:
      return ambiguity_setting(3);
    case ShockKind::EnlargePriors:
      return multi_prior_setting(3);
    case ShockKind::FosdIncome:
    case ShockKind::ShrinkHedging:
    case ShockKind::SosdIncome:
      return income_setting(3, 0.9, 0.5, 2.0);
    case ShockKind::FosdProductivity:
    case ShockKind::FosdWageUp:
    case ShockKind::FosdDepreciationUp:
    case ShockKind::SosdDepreciation:
    case ShockKind::TaxUp:
      return entrepreneur_setting(3);
    default:
      return portfolio_setting(3, 0.9, 0.5, 3.0);
  }
}

WealthGrid grid() {
  WealthGrid g;
  g.w_min = 0.02;
  g.w_max = 20.0;
  g.n = 64;
  return g;
}

// Profit per unit of capital of z k^a l^(1-a) - nu l, written out by hand.
double cd_profit(double a, double z, double nu) {
  const double x = std::pow((1 - a) * z / nu, 1 / a);
  return z * std::pow(x, 1 - a) - nu * x;
}

}  // namespace

TEST_CASE("shock names and numbering") {
  for (int n = 1; n <= 15; ++n) {
    const ShockKind k = parse_shock_kind("cs" + std::to_string(n));
    CHECK(shock_number(k) == n);
    CHECK(parse_shock_kind(shock_name(k)) == k);
  }
  CHECK_THROWS(parse_shock_kind("cs16"));
  CHECK(needs_concavity(ShockKind::SosdReturns));
  CHECK(needs_concavity(ShockKind::SosdIncome));
  CHECK(needs_concavity(ShockKind::SosdDepreciation));
  CHECK_FALSE(needs_concavity(ShockKind::FosdReturns));
}

TEST_CASE("identity magnitudes leave values unchanged") {
  for (int n = 1; n <= 15; ++n) {
    const ShockKind k = parse_shock_kind("cs" + std::to_string(n));
    const auto m = identity_magnitude(k);
    if (!m) continue;
    CAPTURE(n);
    const Setting base = setting_for(k);
    Shock sh;
    sh.kind = k;
    sh.magnitude = *m;
    const Setting shocked = apply_shock(base, sh);
    if (homothetic_setting(base)) {
      const Solution a = solve_homothetic(base), b = solve_homothetic(shocked);
      for (std::size_t t = 0; t < base.horizon(); ++t) CHECK(rel_diff(b.b()[t], a.b()[t]) < 1e-13);
    } else {
      const DropReport r = verify_continuation_drop(base, shocked, grid());
      CHECK(r.passed);
      CHECK(r.worst_excess <= 1e-12);
      const DropReport back = verify_continuation_drop(shocked, base, grid());
      CHECK(back.passed);
    }
  }
}

TEST_CASE("mean-preserving spreads") {
  const Setting base = portfolio_setting(2, 0.9, 0.5, 3.0);
  Shock sh{ShockKind::SosdReturns, 0.1};
  const Setting s = apply_shock(base, sh);
  for (std::size_t t = 0; t < 2; ++t) {
    const Transition& a = base.periods[t].next;
    const Transition& b = s.periods[t].next;
    CHECK(b.states() == 2 * a.states());
    for (std::size_t i = 0; i < a.portfolios(); ++i) {
      CHECK(mean(b.returns[i], b.probs) == doctest::Approx(mean(a.returns[i], a.probs)).epsilon(1e-14));
      CHECK(sosd_dominates(a.returns[i], a.probs, b.returns[i], b.probs));
    }
  }
  const Setting inc = apply_shock(income_setting(2, 0.9, 0.5, 2.0), Shock{ShockKind::SosdIncome, 0.2});
  const Transition& tr = inc.periods[0].next;
  CHECK(mean(tr.income->transitory, tr.probs) == doctest::Approx(0.95).epsilon(1e-14));
}

TEST_CASE("portfolio shrinking is a strict inclusion") {
  const Setting base = portfolio_setting(2, 0.9, 0.5, 3.0);
  Shock sh{ShockKind::ShrinkPortfolios, 0.5};
  const Setting s = apply_shock(base, sh);
  CHECK(s.periods[0].next.portfolios() == 2);
  CHECK(s.periods[0].next.returns[0] == base.periods[0].next.returns[0]);
  sh.keep = {0, 2};
  const Setting k = apply_shock(base, sh);
  CHECK(k.periods[1].next.returns[1] == base.periods[1].next.returns[2]);
  sh.keep = {0, 1, 2};
  CHECK_THROWS_AS(apply_shock(base, sh), PreconditionError);
  sh.keep = {};
  sh.magnitude = 1.0;
  CHECK(apply_shock(base, sh).periods[0].next.portfolios() == 1);
  CHECK_THROWS_AS(apply_shock(apply_shock(base, sh), sh), PreconditionError);
}

TEST_CASE("lower returns lower the value coefficients") {
  for (double psi : {0.5, 1.0, 2.0}) {
    const Setting base = portfolio_setting(3, 0.9, psi, 3.0);
    const Setting s = apply_shock(base, Shock{ShockKind::FosdReturns, 0.9});
    const Solution a = solve_homothetic(base), b = solve_homothetic(s);
    for (std::size_t t = 0; t < 3; ++t) CHECK(b.b()[t] < a.b()[t]);
  }
  // Riskless oracle: scaling the rate by m scales g by m in the last period.
  const Setting r = simple_setting(1, 0.5, 2.0, 2.0, {1.0}, {{1.5}});
  const Solution a = solve_homothetic(r), b = solve_homothetic(apply_shock(r, Shock{ShockKind::FosdReturns, 0.9}));
  CHECK(b.g()[0] == doctest::Approx(0.9 * a.g()[0]).epsilon(1e-14));
}

TEST_CASE("entrepreneur reduction") {
  const CobbDouglasTechnology half(0.5);
  const auto [profit, labor] = half.profit_per_capital(1.0, 1.0);
  CHECK(labor == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(profit == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(half.output(1.0, 0.25) == doctest::Approx(0.5).epsilon(1e-14));

  const EntrepreneurBlock e = block();
  // No capital and no debt: the financial return after tax.
  const auto pure = entrepreneur_reduce(e, EntrepreneurChoice{1, 0.0, 0.0, 1.0});
  CHECK(pure[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pure[1] == doctest::Approx(1.0 + 0.8 * 0.12).epsilon(1e-14));
  // Capital outlay .5 with debt at half the limit.
  const double k = 0.5, b = 0.5 * 0.5 * 0.5, a = 1.0 - k + b;
  const auto mixed = entrepreneur_reduce(e, EntrepreneurChoice{0, k, b, a});
  for (std::size_t j = 0; j < 2; ++j) {
    const double tau = 0.2;
    const double expected = a * (1 + (1 - tau) * 0.02) + ((1 - tau) * (1 - e.depreciation[j]) + tau) * k +
                            (1 - tau) * cd_profit(0.3, e.productivity[j], 0.5) * k - b * (1 + (1 - tau) * 0.02);
    CHECK(mixed[j] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(entrepreneur_choices(e).size() == 2 * (1 + 2 * 3));
  CHECK_THROWS_AS(entrepreneur_reduce(e, EntrepreneurChoice{0, 0.5, 0.3, 0.8}), PreconditionError);
}

TEST_CASE("a zero tax increase changes nothing") {
  const Setting base = entrepreneur_setting(2);
  const Setting s = apply_shock(base, Shock{ShockKind::TaxUp, 0.0});
  for (std::size_t t = 0; t < 2; ++t) CHECK(s.periods[t].next.returns == base.periods[t].next.returns);
  const Solution a = solve_homothetic(base), b = solve_homothetic(s);
  CHECK(a.b()[0] == b.b()[0]);
  const Setting up = apply_shock(base, Shock{ShockKind::TaxUp, 0.05});
  CHECK(solve_homothetic(up).b()[0] < a.b()[0]);
}

TEST_CASE("shocks that do not fit the setting are rejected") {
  const Setting plain = portfolio_setting(2, 0.9, 0.5, 3.0);
  CHECK_THROWS_AS(apply_shock(plain, Shock{ShockKind::FosdIncome, 0.9}), PreconditionError);
  CHECK_THROWS_AS(apply_shock(plain, Shock{ShockKind::TaxUp, 0.1}), PreconditionError);
  CHECK_THROWS_AS(apply_shock(plain, Shock{ShockKind::ConcavifyAmbiguity, 1.0}), PreconditionError);
  CHECK_THROWS_AS(apply_shock(plain, Shock{ShockKind::EnlargePriors, 0.5}), PreconditionError);
  CHECK_THROWS_AS(apply_shock(plain, Shock{ShockKind::FosdReturns, 1.2}), PreconditionError);
  CHECK_THROWS_AS(apply_shock(entrepreneur_setting(2), Shock{ShockKind::FosdReturns, 0.9}), PreconditionError);
}

TEST_CASE("continuation values drop under each shock") {
  for (int n = 1; n <= 15; ++n) {
    CAPTURE(n);
    const ShockKind k = parse_shock_kind("cs" + std::to_string(n));
    const Setting base = setting_for(k);
    Shock sh{k, 0.5};
    if (k == ShockKind::FosdReturns || k == ShockKind::FosdIncome || k == ShockKind::FosdProductivity) sh.magnitude = 0.9;
    if (k == ShockKind::FosdWageUp) sh.magnitude = 1.1;
    if (k == ShockKind::SosdReturns || k == ShockKind::SosdIncome) sh.magnitude = 0.1;
    if (k == ShockKind::FosdDepreciationUp || k == ShockKind::SosdDepreciation || k == ShockKind::TaxUp) sh.magnitude = 0.03;
    const Setting shocked = apply_shock(base, sh);
    const DropReport r = verify_continuation_drop(base, shocked, grid(), needs_concavity(k));
    CHECK(r.passed);
    CHECK(r.violations == 0);
    CHECK(r.nodes > 0);
  }
}

TEST_CASE("relative elasticity of marginal value with income") {
  const Setting s = income_setting(2, 0.9, 0.5, 2.0);
  const Shock sh{ShockKind::FosdReturns, 0.9};
  WealthGrid g = grid();
  g.w_max = 40.0;
  g.n = 128;
  const RemvCheck zero = income_remv_check(s, sh, 1.0, 0.0, g);
  CHECK(zero.eps_direct == 1.0);
  CHECK(zero.eps_formula == 1.0);
  for (double p : {0.5, 1.0, 2.0}) {
    const RemvCheck r = income_remv_check(s, sh, 1.0, p, g);
    CHECK(r.agrees);
    CHECK(std::abs(r.eps_direct - r.eps_formula) <= 1e-5);
    CHECK(r.eps_direct > 1.0);
  }
  CHECK_THROWS_AS(income_remv_check(s, Shock{ShockKind::FosdReturns, 1.0}, 1.0, 0.0, g), DomainError);
}
