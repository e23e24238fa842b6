#include "eislab/solver/backward.hpp"

#include <memory>

#include "eislab/core/error.hpp"
#include "eislab/numerics/parallel.hpp"

namespace eislab {

Solution solve_backward(const Setting& s, const WealthGrid& grid, const SolveOptions& opt) {
  return solve_backward(s, plan_grids({&s}, grid, opt.income, opt.permanent_nodes), opt);
}

Solution solve_backward(const Setting& s, const GridPlan& plan, const SolveOptions& opt) {
  check_setting(s);
  if (s.income && !s.income->borrowing_constraint) {
    throw PreconditionError("only the borrowing-constrained income model (c <= w) is supported");
  }
  const std::size_t T = s.horizon();
  if (plan.wealth.size() != T) throw PreconditionError("grid plan does not match the horizon");
  if (s.income && !plan.has_income) throw PreconditionError("grid plan was made without the income state");
  if (plan.reduced && !income_reducible(s)) throw PreconditionError("grid plan reduces an irreducible income state");
  const bool full = plan.has_income && !plan.reduced;

  SolutionBuilder builder(std::make_shared<const Setting>(s), plan);
  for (std::size_t t = T; t-- > 0;) {
    const Solution& sol = builder.partial();
    const Period& per = s.periods[t];
    const std::vector<double> nodes = plan.wealth[t].nodes();
    const std::size_t n = nodes.size();
    PeriodTables tb;
    if (full) tb.permanent = plan.permanent[t];
    const std::size_t rows = full ? tb.permanent.size() : 1;
    tb.value.resize(rows);
    tb.continuation.resize(rows);
    tb.consumption.assign(rows, std::vector<double>(n));
    tb.portfolio.assign(rows, std::vector<std::size_t>(n));
    tb.continuation_portfolio.assign(rows, std::vector<std::size_t>(n));
    std::vector<std::vector<double>> v(rows, std::vector<double>(n)), V(rows, std::vector<double>(n));

    parallel_for(rows * n, opt.workers, [&](std::size_t k) {
      const std::size_t r = k / n, j = k % n;
      const double p = full ? tb.permanent[r] : 1.0;
      const auto [val, th] = sol.best_portfolio(t, nodes[j], p);
      v[r][j] = val;
      tb.continuation_portfolio[r][j] = th;
    });
    // Savings of zero: M(0) = 0 by normalization without income or intercept.
    const bool zero_anchor = !s.income && s.terminal.intercept == 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double p = full ? tb.permanent[r] : 1.0;
      const double v0 = zero_anchor ? 0.0 : sol.best_portfolio(t, 0.0, p).first;
      tb.continuation[r] = TabulatedFunction(nodes, v[r], v0, plan.wealth[t].order);
    }

    parallel_for(rows * n, opt.workers, [&](std::size_t k) {
      const std::size_t r = k / n, j = k % n;
      const double p = full ? tb.permanent[r] : 1.0;
      const TabulatedFunction& cont = tb.continuation[r];
      const Choice c = maximize_consumption(per.aggregator, nodes[j], [&](double x) { return cont.eval(x); });
      // Inada rules out corners only while v(0) = 0; with income the
      // borrowing constraint can bind and consuming all wealth is optimal.
      const bool binding = cont.at_zero() > 0.0 && c.consumption > 0.5 * nodes[j];
      if (!c.interior && per.aggregator.inada() && !binding) {
        throw ConvergenceError("period " + std::to_string(t) + ": consumption optimum not bracketed at w = " +
                               std::to_string(nodes[j]));
      }
      V[r][j] = c.value;
      tb.consumption[r][j] = c.consumption;
      tb.portfolio[r][j] = sol.best_portfolio(t, nodes[j] - c.consumption, p).second;
    });
    for (std::size_t r = 0; r < rows; ++r) {
      const double V0 = per.aggregator.value(0.0, tb.continuation[r].at_zero());
      tb.value[r] = TabulatedFunction(nodes, V[r], V0, plan.wealth[t].order);
    }
    builder.set(t, std::move(tb));
  }
  return std::move(builder).finish();
}

}  // namespace eislab
