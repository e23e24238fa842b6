#include "eislab/core/setting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "eislab/core/distribution.hpp"
#include "eislab/core/error.hpp"

namespace eislab {
namespace {

std::string where(std::size_t t) { return "period " + std::to_string(t) + ": "; }

void require(bool ok, std::size_t t, const std::string& msg) {
  if (!ok) throw PreconditionError(where(t) + msg);
}

void require_size(const std::vector<double>& v, std::size_t n, std::size_t t, const char* name) {
  require(v.size() == n, t, std::string(name) + " has " + std::to_string(v.size()) +
                                " entries for " + std::to_string(n) + " states");
}

template <typename T>
void duplicate_at(std::vector<T>& v, std::size_t k) {
  v.insert(v.begin() + static_cast<std::ptrdiff_t>(k) + 1, v[k]);
}

template <typename T>
void erase_sorted(std::vector<T>& v, const std::vector<std::size_t>& sorted) {
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) v.erase(v.begin() + static_cast<std::ptrdiff_t>(*it));
}

template <typename Fn>
void for_each_state_vector(Transition& tr, Fn&& fn) {
  fn(tr.probs);
  for (auto& r : tr.returns) fn(r);
  if (tr.income) {
    fn(tr.income->transitory);
    fn(tr.income->permanent);
  }
  if (tr.entrepreneur) {
    auto& e = *tr.entrepreneur;
    fn(e.productivity);
    fn(e.wage);
    fn(e.depreciation);
    fn(e.capital_price_next);
    fn(e.debt_rate);
    fn(e.tax);
    for (auto& r : e.financial_returns) fn(r);
  }
}

}  // namespace

std::pair<double, double> Technology::profit_per_capital(double z, double wage) const {
  auto neg_profit = [&](double x) { return -(z * output(1.0, x) - wage * x); };
  double hi = 1.0;
  while (neg_profit(2.0 * hi) < neg_profit(hi) && hi < 1e12) hi *= 2.0;
  const auto [x, f] = boost::math::tools::brent_find_minima(neg_profit, 0.0, 2.0 * hi, 52);
  return {-f, x};
}

CobbDouglasTechnology::CobbDouglasTechnology(double capital_share) : a_(capital_share) {
  if (!(a_ > 0.0 && a_ < 1.0)) throw DomainError("Cobb-Douglas capital share must lie in (0, 1)");
}

double CobbDouglasTechnology::output(double k, double l) const {
  if (k <= 0.0 || l <= 0.0) return 0.0;
  return std::pow(k, a_) * std::pow(l, 1.0 - a_);
}

// FOC z (1-a) x^{-a} = wage gives x = (z (1-a) / wage)^{1/a}; profit per unit
// of capital is then a z x^{1-a}.
std::pair<double, double> CobbDouglasTechnology::profit_per_capital(double z, double wage) const {
  if (!(z > 0.0 && wage > 0.0)) throw DomainError("productivity and wage must be positive");
  const double x = std::pow(z * (1.0 - a_) / wage, 1.0 / a_);
  return {a_ * z * std::pow(x, 1.0 - a_), x};
}

std::string CobbDouglasTechnology::describe() const {
  std::ostringstream os;
  os << "cobb_douglas(a=" << a_ << ")";
  return os.str();
}

void check_setting(const Setting& s) {
  if (s.periods.empty()) throw PreconditionError("setting has no decision periods");
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const Period& p = s.periods[t];
    const Transition& tr = p.next;
    const std::size_t n = tr.states();
    const std::string problem = probability_problem(tr.probs, 1e-12);
    require(problem.empty(), t, problem);
    require(tr.portfolios() > 0, t, "empty portfolio set");
    for (std::size_t k = 0; k < tr.portfolios(); ++k) {
      require_size(tr.returns[k], n, t, "return vector");
      for (double r : tr.returns[k]) {
        require(r > 0.0 && std::isfinite(r), t, "returns must be strictly positive and finite");
      }
    }
    if (p.ce.kind() != CertaintyEquivalent::Kind::QuasiArithmetic) {
      require(p.ce.state_dimension() == n, t, "priors do not match the number of states");
    }
    if (tr.income) {
      require(s.income.has_value(), t, "income shocks without an income block");
      require_size(tr.income->transitory, n, t, "transitory income");
      require_size(tr.income->permanent, n, t, "permanent income");
      for (double x : tr.income->transitory) require(x > 0.0, t, "transitory income shocks must be positive");
      for (double x : tr.income->permanent) require(x > 0.0, t, "permanent income shocks must be positive");
    } else {
      require(!s.income.has_value(), t, "income block present but transition has no income shocks");
    }
    if (tr.entrepreneur) {
      const EntrepreneurBlock& e = *tr.entrepreneur;
      require(e.technology != nullptr, t, "entrepreneur block without technology");
      require(e.leverage_cap > 0.0 && e.leverage_cap < 1.0, t, "leverage cap must lie in (0, 1)");
      require(e.capital_price > 0.0, t, "capital price must be positive");
      for (const auto* v : {&e.productivity, &e.wage, &e.depreciation, &e.capital_price_next,
                            &e.debt_rate, &e.tax}) {
        require_size(*v, n, t, "entrepreneur state vector");
      }
      for (std::size_t w = 0; w < n; ++w) {
        require(e.depreciation[w] >= 0.0 && e.depreciation[w] < 1.0, t, "depreciation must lie in [0, 1)");
        require(e.tax[w] >= 0.0 && e.tax[w] < 1.0, t, "tax rate must lie in [0, 1)");
        const double margin = e.capital_price_next[w] * (1.0 - e.depreciation[w]) -
                              e.leverage_cap * e.capital_price * (1.0 + e.debt_rate[w]);
        require(margin > 0.0, t, "default-free condition P'(1-delta) - lambda P R_b > 0 fails");
      }
    }
  }
  const std::size_t last = s.periods.back().next.states();
  if (s.terminal.coef.size() != 1 && s.terminal.coef.size() != last) {
    throw PreconditionError("terminal coefficients must be scalar or one per final state");
  }
  for (double b : s.terminal.coef) {
    if (!(b > 0.0)) throw PreconditionError("terminal coefficients must be positive");
  }
  if (!(s.terminal.intercept >= 0.0)) throw PreconditionError("terminal utility must be nonnegative");
  if (s.income && !(s.income->initial_permanent >= 0.0)) {
    throw PreconditionError("initial permanent income must be nonnegative");
  }
}

Setting prune_zero_probability_states(const Setting& s) {
  Setting out = s;
  for (std::size_t t = 0; t < out.periods.size(); ++t) {
    Period& p = out.periods[t];
    std::vector<std::size_t> zero;
    for (std::size_t k = 0; k < p.next.states(); ++k) {
      if (p.next.probs[k] != 0.0) continue;
      bool prior_mass = false;
      for (const auto& pr : p.ce.priors()) prior_mass = prior_mass || pr[k] != 0.0;
      if (!prior_mass) zero.push_back(k);
    }
    if (zero.empty()) continue;
    for_each_state_vector(p.next, [&](std::vector<double>& v) { erase_sorted(v, zero); });
    p.ce = p.ce.drop_states(zero);
    if (t + 1 == out.periods.size() && out.terminal.coef.size() > 1) erase_sorted(out.terminal.coef, zero);
  }
  return out;
}

void split_state(Setting& s, std::size_t t, std::size_t k) {
  Period& p = s.periods.at(t);
  if (k >= p.next.states()) throw DimensionError("split_state: state index out of range");
  for_each_state_vector(p.next, [&](std::vector<double>& v) { duplicate_at(v, k); });
  p.next.probs[k] *= 0.5;
  p.next.probs[k + 1] *= 0.5;
  p.ce = p.ce.split_state(k);
  if (t + 1 == s.periods.size() && s.terminal.coef.size() > 1) duplicate_at(s.terminal.coef, k);
}

}  // namespace eislab
