#include "eislab/core/environment.hpp"

#include <algorithm>

#include "eislab/core/error.hpp"

namespace eislab {

Environment homothetic_environment(Aggregator f, std::function<std::pair<double, double>(double)> g,
                                   double alpha_lo, double alpha_hi) {
  Environment env{std::move(f), {}, std::move(g), {}, alpha_lo, alpha_hi, false};
  env.continuation = [scale = env.scale](double s, double alpha) {
    const auto [gv, gd] = scale(alpha);
    return ContinuationPoint{gv * s, gv, 0.0, gd * s, gd};
  };
  return env;
}

double ShockPath::weight(double alpha) const {
  if (alpha1 == alpha0) throw DomainError("shock path endpoints coincide");
  const double lo = std::min(alpha0, alpha1);
  const double hi = std::max(alpha0, alpha1);
  if (alpha < lo || alpha > hi) throw DomainError("alpha outside the shock path");
  return (alpha - alpha0) / (alpha1 - alpha0);
}

ContinuationPoint ShockPath::combine(const ContinuationPoint& p0, const ContinuationPoint& p1,
                                     double alpha) const {
  const double l = weight(alpha);
  const double d = alpha1 - alpha0;
  ContinuationPoint out;
  if (l == 0.0) {
    out = p0;
  } else if (l == 1.0) {
    out = p1;
  } else {
    out.v = l * p1.v + (1.0 - l) * p0.v;
    out.v_w = l * p1.v_w + (1.0 - l) * p0.v_w;
    out.v_ww = l * p1.v_ww + (1.0 - l) * p0.v_ww;
  }
  out.v_alpha = (p1.v - p0.v) / d;
  out.v_walpha = (p1.v_w - p0.v_w) / d;
  return out;
}

}  // namespace eislab
