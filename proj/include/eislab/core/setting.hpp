#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eislab/core/aggregator.hpp"
#include "eislab/core/certainty_equivalent.hpp"

namespace eislab {

// Transitory (tau) and permanent (eta) income shocks, one entry per state.
struct IncomeShocks {
  std::vector<double> transitory;
  std::vector<double> permanent;
};

// Degree-one production technology g(k, l).
class Technology {
 public:
  virtual ~Technology() = default;
  virtual double output(double k, double l) const = 0;
  // Maximal operating profit per unit of capital, max_x z g(1, x) - wage x,
  // together with the optimal labor per unit of capital.
  virtual std::pair<double, double> profit_per_capital(double z, double wage) const;
  virtual std::string describe() const { return "custom"; }
};

// g(k, l) = k^a l^(1-a); profit maximization has a closed form.
class CobbDouglasTechnology final : public Technology {
 public:
  explicit CobbDouglasTechnology(double capital_share);
  double output(double k, double l) const override;
  std::pair<double, double> profit_per_capital(double z, double wage) const override;
  std::string describe() const override;
  double capital_share() const { return a_; }

 private:
  double a_;
};

// Entrepreneur investing savings in financial portfolios and in own capital
// financed partly with one-period debt. Per-state vectors describe period t+1.
struct EntrepreneurBlock {
  std::shared_ptr<const Technology> technology;
  double capital_price = 1.0;  // P_k at t
  double leverage_cap = 0.5;   // lambda in (0, 1)
  // Choice grids: capital outlay P_k k per unit of savings, and debt as a
  // fraction of the borrowing limit lambda P_k k.
  std::vector<double> capital_grid;
  std::vector<double> leverage_grid;

  std::vector<double> productivity;        // z
  std::vector<double> wage;                // nu
  std::vector<double> depreciation;        // delta
  std::vector<double> capital_price_next;  // P_k at t+1
  std::vector<double> debt_rate;           // r_b (net)
  std::vector<double> tax;                 // capital tax rate
  std::vector<std::vector<double>> financial_returns;  // net r(theta), [theta][state]
};

// One composite entrepreneur choice, quantities per unit of savings.
struct EntrepreneurChoice {
  std::size_t financial = 0;
  double capital_outlay = 0.0;  // P_k k
  double debt = 0.0;            // b
  double financial_assets = 0.0;  // a
};

// Everything that moves wealth from t to t+1.
struct Transition {
  std::vector<double> probs;
  // Gross returns R(theta, omega) > 0, [portfolio][state]. Derived from the
  // entrepreneur block when that is present.
  std::vector<std::vector<double>> returns;
  std::optional<IncomeShocks> income;
  std::optional<EntrepreneurBlock> entrepreneur;
  std::vector<EntrepreneurChoice> entrepreneur_choices;

  std::size_t states() const { return probs.size(); }
  std::size_t portfolios() const { return returns.size(); }
};

struct Period {
  Aggregator aggregator;
  CertaintyEquivalent ce;
  Transition next;
};

// u_T(c) = b_T(omega) c + intercept. `coef` has one entry (state independent)
// or one per state of the last transition.
struct TerminalUtility {
  std::vector<double> coef{1.0};
  double intercept = 0.0;

  double coefficient(std::size_t state) const { return coef.size() == 1 ? coef[0] : coef.at(state); }
  double value(double c, std::size_t state) const { return coefficient(state) * c + intercept; }
};

// Permanent income p_t with y_t = p_t tau_t and p_t = p_{t-1} eta_t.
struct IncomeBlock {
  double initial_permanent = 1.0;
  bool borrowing_constraint = true;
};

// Finite-horizon problem: decision periods t = 0..T-1 with terminal utility at T.
struct Setting {
  std::vector<Period> periods;
  TerminalUtility terminal;
  std::optional<IncomeBlock> income;

  std::size_t horizon() const { return periods.size(); }
};

// Throws PreconditionError when a hard invariant fails: inconsistent
// dimensions, non-positive returns, invalid probabilities, non-positive income
// shocks, entrepreneur leverage cap outside (0, 1) or debt that can default.
void check_setting(const Setting& s);

// Removes states with zero reference probability (and zero prior mass).
Setting prune_zero_probability_states(const Setting& s);

// Splits state k of transition t into two equally likely halves with
// otherwise identical contents.
void split_state(Setting& s, std::size_t t, std::size_t k);

}  // namespace eislab
