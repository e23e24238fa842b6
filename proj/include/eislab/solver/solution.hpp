#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "eislab/core/environment.hpp"
#include "eislab/core/setting.hpp"
#include "eislab/numerics/pchip.hpp"
#include "eislab/solver/grid.hpp"

namespace eislab {

// Positive increasing function tabulated on positive nodes and interpolated
// in (log x, log y). Below the first node it continues as a power law when
// y(0) = 0, otherwise as the quadratic through y(0) matching value and slope
// at the first node. Evaluation above the last node throws DomainError.
class TabulatedFunction {
 public:
  struct Value {
    double y = 0.0;
    double dy = 0.0;
    double d2y = 0.0;
  };

  TabulatedFunction() = default;
  TabulatedFunction(std::vector<double> x, std::vector<double> y, double y_at_zero,
                    Interpolation order = Interpolation::MonotoneCubic);

  Value eval(double x) const;
  double operator()(double x) const { return eval(x).y; }

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  double at_zero() const { return y0_; }
  Interpolation order() const { return order_; }
  bool empty() const { return x_.empty(); }

 private:
  Value inside(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  double y0_ = 0.0;
  Interpolation order_ = Interpolation::MonotoneCubic;
  MonotoneCubic log_;
};

// Optimal choice at one wealth level.
struct Choice {
  double consumption = 0.0;
  double value = 0.0;
  std::size_t portfolio = 0;
  bool interior = true;
};

// Tables for one decision period. Rows index permanent-income nodes in the
// full two-dimensional mode; otherwise there is a single row (holding the
// normalized functions of x = w / p when the income state is reduced).
struct PeriodTables {
  std::vector<double> permanent;
  std::vector<TabulatedFunction> value;         // V_t(w)
  std::vector<TabulatedFunction> continuation;  // v_t(s) on the same nodes
  std::vector<std::vector<double>> consumption;
  std::vector<std::vector<std::size_t>> portfolio;               // at the optimal savings
  std::vector<std::vector<std::size_t>> continuation_portfolio;  // maximizer at each savings node
};

class Solution {
 public:
  Solution() = default;

  std::size_t horizon() const { return setting_ ? setting_->horizon() : 0; }
  const Setting& setting() const { return *setting_; }
  const GridPlan& plan() const { return plan_; }
  bool tabulated() const { return !periods_.empty(); }
  const PeriodTables& tables(std::size_t t) const { return periods_.at(t); }

  // Closed-form homothetic data for t < T: V_t(w) = b_t w, v_t(s) = g_t s,
  // c_t(w) = share_t w.
  bool homothetic() const { return !b_.empty(); }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& g() const { return g_; }
  const std::vector<double>& share() const { return share_; }
  const std::vector<std::size_t>& homothetic_portfolio() const { return theta_; }

  // Permanent income at t = 0 (1 without income).
  double initial_permanent() const;

  double value(std::size_t t, double w, double p = 1.0) const;
  // v_t(s, p) with s- and second s-derivatives.
  ContinuationPoint continuation(std::size_t t, double s, double p = 1.0) const;
  // V_{t+1}(w, p) in state omega of transition t; the terminal utility when
  // t + 1 = T. In reduced mode w and the result are normalized by p.
  double next_value(std::size_t t, double w, double p, std::size_t state) const;
  // Portfolio enumeration at savings s: max over theta of M_t(V_{t+1}(W')),
  // ties to the lowest index.
  std::pair<double, std::size_t> best_portfolio(std::size_t t, double s, double p = 1.0) const;
  // Re-optimizes consumption and portfolio at (w, p) against the solved v_t.
  Choice choose(std::size_t t, double w, double p = 1.0) const;
  // Smoothness of v_t around savings s: no portfolio switch among the
  // neighboring nodes and a log-log slope jump below 1e-2.
  bool smooth_at(std::size_t t, double s, double p = 1.0) const;

 private:
  friend Solution make_homothetic_solution(std::shared_ptr<const Setting>, std::vector<double>,
                                           std::vector<double>, std::vector<double>, std::vector<std::size_t>);
  friend Solution make_tabulated_solution(std::shared_ptr<const Setting>, GridPlan, std::vector<PeriodTables>);
  friend class SolutionBuilder;

  // Row interpolation across permanent-income nodes.
  TabulatedFunction::Value rows_eval(const std::vector<double>& permanent, const std::vector<TabulatedFunction>& rows,
                                     double x, double p) const;

  std::shared_ptr<const Setting> setting_;
  GridPlan plan_;
  std::vector<PeriodTables> periods_;
  std::vector<double> b_;
  std::vector<double> g_;
  std::vector<double> share_;
  std::vector<std::size_t> theta_;
};

Solution make_homothetic_solution(std::shared_ptr<const Setting> s, std::vector<double> b, std::vector<double> g,
                                  std::vector<double> share, std::vector<std::size_t> theta);
Solution make_tabulated_solution(std::shared_ptr<const Setting> s, GridPlan plan, std::vector<PeriodTables> periods);

// Lets backward induction fill periods from T-1 down while reusing the
// evaluation code of Solution for the already solved later periods.
class SolutionBuilder {
 public:
  SolutionBuilder(std::shared_ptr<const Setting> s, GridPlan plan);
  // Period t must be the next one down (T-1 first).
  void set(std::size_t t, PeriodTables tables);
  const Solution& partial() const { return sol_; }
  Solution finish() &&;

 private:
  Solution sol_;
  std::size_t lowest_;
};

// Maximizes f(c, v(w - c)) over c in (0, w). Shared by the solver and the
// statics re-solves.
Choice maximize_consumption(const Aggregator& f, double w,
                            const std::function<TabulatedFunction::Value(double)>& v);

// Continuation value along a shock path: both endpoint solutions must cover
// period t; alpha-derivatives come from the linear parameterization.
ContinuationPoint continuation_value(const Solution& at_alpha0, const Solution& at_alpha1, const ShockPath& path,
                                     std::size_t t, double s, double alpha, double p = 1.0);

// One-period environment at period t (and permanent income p) built from two
// solved endpoints of a shock path.
Environment path_environment(std::shared_ptr<const Solution> at_alpha0, std::shared_ptr<const Solution> at_alpha1,
                             const ShockPath& path, std::size_t t, double p = 1.0);

}  // namespace eislab
