#include "eislab/solver/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eislab/core/error.hpp"

namespace eislab {
namespace {

constexpr double kStretch = 1.0 + 1e-9;

struct Bounds {
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  double tau_min = std::numeric_limits<double>::infinity();
  double tau_max = 0.0;
  double eta_min = std::numeric_limits<double>::infinity();
  double eta_max = 0.0;
};

Bounds bounds_of(const Transition& tr) {
  Bounds b;
  for (const auto& row : tr.returns) {
    for (double r : row) {
      b.r_min = std::min(b.r_min, r);
      b.r_max = std::max(b.r_max, r);
    }
  }
  if (tr.income) {
    for (double x : tr.income->transitory) {
      b.tau_min = std::min(b.tau_min, x);
      b.tau_max = std::max(b.tau_max, x);
    }
    for (double x : tr.income->permanent) {
      b.eta_min = std::min(b.eta_min, x);
      b.eta_max = std::max(b.eta_max, x);
    }
  } else {
    b.tau_min = b.tau_max = 0.0;
    b.eta_min = b.eta_max = 1.0;
  }
  return b;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = i + 1 == n ? hi : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  x[0] = lo;
  return x;
}

}  // namespace

void WealthGrid::check() const {
  if (!(w_min > 0.0) || !(w_max > w_min)) throw PreconditionError("wealth grid needs 0 < w_min < w_max");
  if (n < 4) throw PreconditionError("wealth grid needs at least 4 nodes");
}

std::vector<double> WealthGrid::nodes() const {
  check();
  return log_space(w_min, w_max, n);
}

bool income_reducible(const Setting& s) {
  if (s.terminal.intercept != 0.0) return false;
  for (const auto& p : s.periods) {
    if (!p.aggregator.homogeneous_degree_one() || !p.ce.homogeneous_degree_one()) return false;
  }
  return true;
}

GridPlan plan_grids(const std::vector<const Setting*>& settings, const WealthGrid& base, IncomeMode mode,
                    std::size_t permanent_nodes) {
  base.check();
  if (settings.empty()) throw PreconditionError("no settings to plan a grid for");
  const std::size_t T = settings.front()->horizon();
  GridPlan plan;
  bool all_reducible = true;
  for (const Setting* s : settings) {
    if (s->horizon() != T) throw PreconditionError("settings on a joint grid must share the horizon");
    if (s->income) plan.has_income = true;
    all_reducible = all_reducible && income_reducible(*s);
  }
  if (plan.has_income) {
    if (mode == IncomeMode::Reduced && !all_reducible) {
      throw PreconditionError("income state cannot be reduced: aggregators, certainty equivalents and terminal "
                              "utility must be homogeneous of degree one");
    }
    plan.reduced = mode == IncomeMode::Reduced || (mode == IncomeMode::Auto && all_reducible);
  }
  const bool full = plan.has_income && !plan.reduced;
  if (full && permanent_nodes < 4) throw PreconditionError("need at least 4 permanent-income nodes");

  double lo = base.w_min, hi = base.w_max;
  double p_lo = 0.0, p_hi = 0.0;
  if (full) {
    double p0 = 1.0;
    for (const Setting* s : settings) {
      if (s->income) p0 = s->income->initial_permanent;
    }
    p_lo = 0.5 * p0;
    p_hi = 2.0 * p0;
  }
  for (std::size_t t = 0; t < T; ++t) {
    WealthGrid g = base;
    g.w_min = lo;
    g.w_max = hi;
    plan.wealth.push_back(g);
    if (full) plan.permanent.push_back(log_space(p_lo, p_hi, permanent_nodes));
    Bounds b;
    b.r_min = b.tau_min = b.eta_min = std::numeric_limits<double>::infinity();
    b.r_max = b.tau_max = b.eta_max = 0.0;
    for (const Setting* s : settings) {
      const Bounds c = bounds_of(s->periods[t].next);
      b.r_min = std::min(b.r_min, c.r_min);
      b.r_max = std::max(b.r_max, c.r_max);
      b.tau_min = std::min(b.tau_min, c.tau_min);
      b.tau_max = std::max(b.tau_max, c.tau_max);
      b.eta_min = std::min(b.eta_min, c.eta_min);
      b.eta_max = std::max(b.eta_max, c.eta_max);
    }
    if (plan.reduced) {
      lo = lo * b.r_min / b.eta_max;
      hi = (hi * b.r_max / b.eta_min + b.tau_max) * kStretch;
    } else if (full) {
      p_lo *= b.eta_min;
      p_hi *= b.eta_max;
      lo = lo * b.r_min;
      hi = (hi * b.r_max + p_hi * b.tau_max) * kStretch;
    } else {
      lo = lo * b.r_min;
      hi = hi * b.r_max * kStretch;
    }
  }
  return plan;
}

}  // namespace eislab
