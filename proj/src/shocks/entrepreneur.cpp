#include "eislab/shocks/entrepreneur.hpp"

#include <cmath>

#include "eislab/core/error.hpp"

namespace eislab {

std::vector<double> entrepreneur_reduce(const EntrepreneurBlock& e, const EntrepreneurChoice& ch) {
  if (!e.technology) throw PreconditionError("entrepreneur block without technology");
  if (ch.financial >= e.financial_returns.size()) throw DimensionError("financial portfolio index out of range");
  if (ch.capital_outlay < 0.0 || ch.debt < 0.0) throw PreconditionError("capital and debt must be nonnegative");
  if (ch.debt > e.leverage_cap * ch.capital_outlay * (1.0 + 1e-12)) {
    throw PreconditionError("debt exceeds the borrowing limit lambda P_k k");
  }
  if (ch.financial_assets < -1e-12) throw PreconditionError("financial assets must be nonnegative");
  const std::size_t n = e.productivity.size();
  const double k = ch.capital_outlay / e.capital_price;
  std::vector<double> R(n);
  for (std::size_t w = 0; w < n; ++w) {
    const double tau = e.tax[w];
    double profit = 0.0;
    if (k > 0.0) profit = e.technology->profit_per_capital(e.productivity[w], e.wage[w]).first * k;
    const double capital_value = ((1.0 - tau) * e.capital_price_next[w] * (1.0 - e.depreciation[w]) +
                                  tau * e.capital_price) * k;
    R[w] = ch.financial_assets * (1.0 + (1.0 - tau) * e.financial_returns[ch.financial][w]) + capital_value +
           (1.0 - tau) * profit - ch.debt * (1.0 + (1.0 - tau) * e.debt_rate[w]);
    if (!(R[w] > 0.0)) {
      throw PreconditionError("entrepreneur return is not positive in state " + std::to_string(w) +
                              ": the default-free condition fails");
    }
  }
  return R;
}

std::vector<EntrepreneurChoice> entrepreneur_choices(const EntrepreneurBlock& e) {
  std::vector<EntrepreneurChoice> out;
  const std::vector<double> capital = e.capital_grid.empty() ? std::vector<double>{0.0} : e.capital_grid;
  const std::vector<double> leverage = e.leverage_grid.empty() ? std::vector<double>{0.0} : e.leverage_grid;
  for (std::size_t th = 0; th < e.financial_returns.size(); ++th) {
    for (double kap : capital) {
      if (kap < 0.0) throw PreconditionError("capital grid must be nonnegative");
      for (std::size_t i = 0; i < leverage.size(); ++i) {
        const double l = leverage[i];
        if (l < 0.0 || l > 1.0) throw PreconditionError("leverage grid must lie in [0, 1]");
        if (kap == 0.0 && i > 0) break;
        const double b = l * e.leverage_cap * kap;
        const double a = 1.0 - kap + b;
        if (a < 0.0) continue;
        out.push_back({th, kap, b, a});
      }
    }
  }
  if (out.empty()) throw PreconditionError("entrepreneur grids admit no feasible choice");
  return out;
}

void reduce_entrepreneur_blocks(Setting& s) {
  for (auto& p : s.periods) {
    Transition& tr = p.next;
    if (!tr.entrepreneur) continue;
    if (tr.entrepreneur_choices.empty()) tr.entrepreneur_choices = entrepreneur_choices(*tr.entrepreneur);
    tr.returns.clear();
    for (const auto& ch : tr.entrepreneur_choices) tr.returns.push_back(entrepreneur_reduce(*tr.entrepreneur, ch));
  }
}

}  // namespace eislab
