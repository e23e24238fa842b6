#pragma once

#include <functional>
#include <optional>

#include "eislab/core/aggregator.hpp"
#include "eislab/core/setting.hpp"

namespace eislab {

// Continuation value v(s, alpha) at savings s and its derivatives.
struct ContinuationPoint {
  double v = 0.0;
  double v_w = 0.0;
  double v_ww = 0.0;
  double v_alpha = 0.0;
  double v_walpha = 0.0;
};

// One-period reduction (f, v): the agent solves max_{c in [0, w]} f(c, v(w - c, alpha)).
struct Environment {
  Aggregator aggregator;
  std::function<ContinuationPoint(double s, double alpha)> continuation;
  // Homothetic environments have v(s, alpha) = g(alpha) s; `scale` returns
  // (g, g') when set.
  std::function<std::pair<double, double>(double alpha)> scale;
  // Reports whether v is smooth around savings s (tabulated environments flag
  // nodes next to portfolio switches). Empty means smooth everywhere.
  std::function<bool(double s, double alpha)> smooth_at;
  // Admissible alpha range.
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
  // v_ww comes from differentiating an interpolant twice.
  bool grid_accuracy = false;

  bool homothetic() const { return static_cast<bool>(scale); }
  ContinuationPoint at(double s, double alpha) const { return continuation(s, alpha); }
};

// Homothetic environment with v(s, alpha) = g(alpha) s.
Environment homothetic_environment(Aggregator f, std::function<std::pair<double, double>(double)> g,
                                   double alpha_lo = 0.0, double alpha_hi = 1.0);

// Pair of endpoint settings connected by the convex-combination rule
//   v(w, a) = l(a) v(w, a1) + (1 - l(a)) v(w, a0),  l(a) = (a - a0) / (a1 - a0).
struct ShockPath {
  Setting at_alpha0;
  Setting at_alpha1;
  double alpha0 = 0.0;
  double alpha1 = 1.0;

  double weight(double alpha) const;
  // Combines endpoint values (v, v_w, v_ww) into the path point at alpha;
  // alpha-derivatives are exact for the linear parameterization.
  ContinuationPoint combine(const ContinuationPoint& p0, const ContinuationPoint& p1, double alpha) const;
};

}  // namespace eislab
