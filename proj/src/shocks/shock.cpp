#include "eislab/shocks/shock.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "eislab/core/distribution.hpp"
#include "eislab/core/error.hpp"
#include "eislab/shocks/entrepreneur.hpp"

namespace eislab {
namespace {

constexpr std::array<const char*, 15> kNames = {
    "concavify_risk",     "shrink_portfolios",   "fosd_returns",     "sosd_returns",    "devalue_consumption",
    "concavify_ambiguity", "enlarge_priors",     "fosd_income",      "shrink_hedging",  "sosd_income",
    "fosd_productivity",  "fosd_wage_up",        "fosd_depreciation_up", "sosd_depreciation", "tax_up"};

[[noreturn]] void incompatible(ShockKind k, const std::string& why) {
  throw PreconditionError(shock_name(k) + " (cs" + std::to_string(shock_number(k)) + "): " + why);
}

std::vector<std::size_t> affected_periods(const Setting& s, const Shock& sh) {
  const std::size_t T = s.horizon();
  std::vector<std::size_t> out;
  if (sh.kind == ShockKind::DevalueConsumption) {
    const std::size_t from = sh.period.value_or(1);
    if (from >= T) incompatible(sh.kind, "no period at or after " + std::to_string(from) + " to devalue");
    for (std::size_t t = from; t < T; ++t) out.push_back(t);
    return out;
  }
  if (sh.period) {
    if (*sh.period >= T) incompatible(sh.kind, "period " + std::to_string(*sh.period) + " beyond the horizon");
    return {*sh.period};
  }
  for (std::size_t t = 0; t < T; ++t) out.push_back(t);
  return out;
}

void require_fosd(ShockKind k, const std::vector<double>& base, const std::vector<double>& bp,
                  const std::vector<double>& shocked, const std::vector<double>& sp) {
  if (!fosd_dominates(base, bp, shocked, sp)) incompatible(k, "shocked distribution is not FOSD-dominated");
}

void require_sosd(ShockKind k, const std::vector<double>& base, const std::vector<double>& bp,
                  const std::vector<double>& shocked, const std::vector<double>& sp) {
  const double m0 = mean(base, bp), m1 = mean(shocked, sp);
  if (std::abs(m0 - m1) > 1e-12 * std::max(1.0, std::abs(m0))) incompatible(k, "spread does not preserve the mean");
  if (!sosd_dominates(base, bp, shocked, sp)) incompatible(k, "shocked distribution is not SOSD-dominated");
}

void rebuild_entrepreneur(Transition& tr) {
  tr.returns.clear();
  for (const auto& ch : tr.entrepreneur_choices) tr.returns.push_back(entrepreneur_reduce(*tr.entrepreneur, ch));
}

// Splits every state of transition t; state k becomes 2k (lower) and 2k+1 (upper).
void split_all_states(Setting& s, std::size_t t) {
  for (std::size_t k = s.periods[t].next.states(); k-- > 0;) split_state(s, t, k);
}

void check_magnitude(const Shock& sh, bool ok, const std::string& what) {
  if (!ok || !std::isfinite(sh.magnitude)) incompatible(sh.kind, "magnitude must be " + what);
}

}  // namespace

int shock_number(ShockKind k) { return static_cast<int>(k); }

std::string shock_name(ShockKind k) { return kNames.at(static_cast<std::size_t>(shock_number(k) - 1)); }

ShockKind parse_shock_kind(const std::string& s) {
  if (s.size() > 2 && (s.rfind("cs", 0) == 0 || s.rfind("CS", 0) == 0)) {
    try {
      const int n = std::stoi(s.substr(2));
      if (n >= 1 && n <= 15 && std::to_string(n) == s.substr(2)) return static_cast<ShockKind>(n);
    } catch (const std::exception&) {
    }
  }
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (s == kNames[i]) return static_cast<ShockKind>(i + 1);
  }
  throw DomainError("unknown shock kind '" + s + "' (expected cs1..cs15 or a shock name)");
}

std::optional<double> identity_magnitude(ShockKind k) {
  switch (k) {
    case ShockKind::ConcavifyRisk:
    case ShockKind::ConcavifyAmbiguity:
    case ShockKind::FosdDepreciationUp:
    case ShockKind::TaxUp:
    case ShockKind::DevalueConsumption:
    case ShockKind::SosdReturns:
    case ShockKind::SosdIncome:
    case ShockKind::SosdDepreciation:
      return 0.0;
    case ShockKind::FosdReturns:
    case ShockKind::FosdIncome:
    case ShockKind::FosdProductivity:
    case ShockKind::FosdWageUp:
      return 1.0;
    default:
      return std::nullopt;
  }
}

bool needs_concavity(ShockKind k) {
  return k == ShockKind::SosdReturns || k == ShockKind::SosdIncome || k == ShockKind::SosdDepreciation;
}

Setting apply_shock(const Setting& base, const Shock& sh) {
  check_setting(base);
  Setting s = base;
  const ShockKind k = sh.kind;
  const double m = sh.magnitude;
  const auto periods = affected_periods(base, sh);
  const bool income_kind = k == ShockKind::FosdIncome || k == ShockKind::ShrinkHedging || k == ShockKind::SosdIncome;
  const bool entrepreneur_kind = shock_number(k) >= 11;
  if (income_kind && !s.income) incompatible(k, "setting has no income block");

  // Splitting shifts state indices, so walk periods from the back.
  for (auto it = periods.rbegin(); it != periods.rend(); ++it) {
    const std::size_t t = *it;
    Period& per = s.periods[t];
    Transition& tr = per.next;
    const Transition before = tr;
    if (entrepreneur_kind && !tr.entrepreneur) {
      incompatible(k, "period " + std::to_string(t) + " has no entrepreneur block");
    }
    switch (k) {
      case ShockKind::ConcavifyRisk:
        check_magnitude(sh, m >= 0.0, ">= 0");
        per.ce = per.ce.with_risk(per.ce.risk().more_concave(m));
        break;
      case ShockKind::ConcavifyAmbiguity:
        check_magnitude(sh, m >= 0.0, ">= 0");
        if (per.ce.kind() != CertaintyEquivalent::Kind::SmoothAmbiguity) {
          incompatible(k, "period " + std::to_string(t) + " has no smooth-ambiguity certainty equivalent");
        }
        per.ce = per.ce.with_ambiguity(per.ce.ambiguity().more_concave(m));
        break;
      case ShockKind::DevalueConsumption:
        check_magnitude(sh, m >= 0.0, ">= 0");
        per.aggregator = per.aggregator.devalued(1.0 + m);
        break;
      case ShockKind::ShrinkPortfolios:
      case ShockKind::ShrinkHedging: {
        const std::size_t n = tr.portfolios();
        std::vector<std::size_t> keep = sh.keep;
        if (keep.empty()) {
          check_magnitude(sh, m > 0.0 && m <= 1.0, "in (0, 1]");
          if (n < 2) incompatible(k, "a single portfolio cannot be shrunk");
          const auto drop = static_cast<std::size_t>(std::ceil(m * static_cast<double>(n - 1) - 1e-12));
          for (std::size_t i = 0; i + std::max<std::size_t>(drop, 1) < n; ++i) keep.push_back(i);
        }
        std::sort(keep.begin(), keep.end());
        if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() || keep.empty() || keep.back() >= n ||
            keep.size() >= n) {
          incompatible(k, "kept portfolios must form a strict, nonempty subset of the portfolio set");
        }
        std::vector<std::vector<double>> returns;
        std::vector<EntrepreneurChoice> choices;
        for (std::size_t i : keep) {
          returns.push_back(tr.returns[i]);
          if (!tr.entrepreneur_choices.empty()) choices.push_back(tr.entrepreneur_choices[i]);
        }
        tr.returns = std::move(returns);
        tr.entrepreneur_choices = std::move(choices);
        break;
      }
      case ShockKind::FosdReturns:
        check_magnitude(sh, m > 0.0 && m <= 1.0, "in (0, 1]");
        if (tr.entrepreneur) incompatible(k, "entrepreneur returns are shocked through cs11-cs15");
        for (auto& row : tr.returns) {
          for (double& r : row) r *= m;
        }
        for (std::size_t i = 0; i < tr.portfolios(); ++i) {
          require_fosd(k, before.returns[i], before.probs, tr.returns[i], tr.probs);
        }
        break;
      case ShockKind::SosdReturns: {
        check_magnitude(sh, m >= 0.0, ">= 0");
        if (tr.entrepreneur) incompatible(k, "entrepreneur returns are shocked through cs11-cs15");
        split_all_states(s, t);
        Transition& sp = s.periods[t].next;
        for (auto& row : sp.returns) {
          for (std::size_t j = 0; j < row.size(); j += 2) {
            const double sigma = std::min(m, 0.99 * row[j]);
            row[j] -= sigma;
            row[j + 1] += sigma;
          }
        }
        for (std::size_t i = 0; i < sp.portfolios(); ++i) {
          require_sosd(k, before.returns[i], before.probs, sp.returns[i], sp.probs);
        }
        break;
      }
      case ShockKind::EnlargePriors: {
        if (per.ce.kind() != CertaintyEquivalent::Kind::MultiPrior) {
          incompatible(k, "period " + std::to_string(t) + " has no multi-prior certainty equivalent");
        }
        std::vector<double> prior = sh.extra_prior;
        if (prior.empty()) {
          check_magnitude(sh, m > 0.0 && m <= 1.0, "in (0, 1]");
          std::size_t worst = 0;
          double worst_mean = INFINITY;
          for (std::size_t j = 0; j < tr.states(); ++j) {
            double avg = 0.0;
            for (const auto& row : tr.returns) avg += row[j];
            if (avg < worst_mean) {
              worst_mean = avg;
              worst = j;
            }
          }
          prior = tr.probs;
          for (double& q : prior) q *= 1.0 - m;
          prior[worst] += m;
        }
        if (prior.size() != tr.states() || !probability_problem(prior, 1e-12).empty()) {
          incompatible(k, "added prior must be a distribution over the period's states");
        }
        auto priors = per.ce.priors();
        for (const auto& q : priors) {
          bool same = true;
          for (std::size_t j = 0; j < q.size(); ++j) same = same && std::abs(q[j] - prior[j]) <= 1e-15;
          if (same) incompatible(k, "added prior is already in the set; inclusion would not be strict");
        }
        priors.push_back(prior);
        per.ce = per.ce.with_priors(std::move(priors));
        break;
      }
      case ShockKind::FosdIncome: {
        check_magnitude(sh, m > 0.0 && m <= 1.0, "in (0, 1]");
        auto& v = sh.component == IncomeComponent::Transitory ? tr.income->transitory : tr.income->permanent;
        const auto old = v;
        for (double& x : v) x *= m;
        require_fosd(k, old, tr.probs, v, tr.probs);
        break;
      }
      case ShockKind::SosdIncome: {
        check_magnitude(sh, m >= 0.0, ">= 0");
        split_all_states(s, t);
        Transition& sp = s.periods[t].next;
        auto& v = sh.component == IncomeComponent::Transitory ? sp.income->transitory : sp.income->permanent;
        const auto& old = sh.component == IncomeComponent::Transitory ? before.income->transitory
                                                                     : before.income->permanent;
        for (std::size_t j = 0; j < v.size(); j += 2) {
          const double sigma = std::min(m, 0.99 * v[j]);
          v[j] -= sigma;
          v[j + 1] += sigma;
        }
        require_sosd(k, old, before.probs, v, sp.probs);
        break;
      }
      case ShockKind::FosdProductivity:
        check_magnitude(sh, m > 0.0 && m <= 1.0, "in (0, 1]");
        for (double& z : tr.entrepreneur->productivity) z *= m;
        break;
      case ShockKind::FosdWageUp:
        check_magnitude(sh, m >= 1.0, ">= 1");
        for (double& x : tr.entrepreneur->wage) x *= m;
        break;
      case ShockKind::FosdDepreciationUp:
        check_magnitude(sh, m >= 0.0, ">= 0");
        for (double& d : tr.entrepreneur->depreciation) d += m;
        break;
      case ShockKind::TaxUp:
        check_magnitude(sh, m >= 0.0, ">= 0");
        for (double& x : tr.entrepreneur->tax) x += m;
        break;
      case ShockKind::SosdDepreciation: {
        check_magnitude(sh, m >= 0.0, ">= 0");
        split_all_states(s, t);
        EntrepreneurBlock& e = *s.periods[t].next.entrepreneur;
        for (std::size_t j = 0; j < e.depreciation.size(); j += 2) {
          const double d = e.depreciation[j];
          const double room = (e.capital_price_next[j] * (1.0 - d) -
                               e.leverage_cap * e.capital_price * (1.0 + e.debt_rate[j])) /
                              e.capital_price_next[j];
          const double sigma = std::min({m, d, 0.99 * (1.0 - d), 0.99 * room});
          e.depreciation[j] -= sigma;
          e.depreciation[j + 1] += sigma;
        }
        require_sosd(k, before.entrepreneur->depreciation, before.probs, e.depreciation, s.periods[t].next.probs);
        break;
      }
    }
    if (entrepreneur_kind) {
      Transition& now = s.periods[t].next;
      try {
        check_setting(s);
      } catch (const PreconditionError& e) {
        incompatible(k, e.what());
      }
      rebuild_entrepreneur(now);
      for (std::size_t i = 0; i < now.portfolios(); ++i) {
        if (k == ShockKind::SosdDepreciation) {
          require_sosd(k, before.returns[i], before.probs, now.returns[i], now.probs);
        } else {
          require_fosd(k, before.returns[i], before.probs, now.returns[i], now.probs);
        }
      }
    }
  }
  check_setting(s);
  return s;
}

}  // namespace eislab
