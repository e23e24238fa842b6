#include "eislab/statics/statics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eislab/core/error.hpp"
#include "eislab/numerics/optimize.hpp"
#include "eislab/solver/solution.hpp"

namespace eislab {
namespace {

constexpr double kAlphaStep = 1e-5;

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// log(f_c / f_v) and its gradient in (log c, log v).
struct Mrs {
  double f = 0.0;
  double s = 0.0;
  double f_lc = 0.0, f_lv = 0.0;
  double s_lc = 0.0, s_lv = 0.0;
};

Mrs mrs(const Aggregator& f, double lc, double lv) {
  const double c = std::exp(lc), v = std::exp(lv);
  const AggregatorPoint q = f.evaluate(c, v);
  Mrs m;
  m.f = q.f;
  m.s = std::log(q.fc / q.fv);
  m.f_lc = q.fc * c;
  m.f_lv = q.fv * v;
  m.s_lc = c * (q.fcc / q.fc - q.fcv / q.fv);
  m.s_lv = v * (q.fcv / q.fc - q.fvv / q.fv);
  return m;
}

// Point on the indifference curve f = target with log MRS equal to s.
std::pair<double, double> solve_on_curve(const Aggregator& f, double target, double s, double lc, double lv) {
  for (int it = 0; it < 100; ++it) {
    const Mrs m = mrs(f, lc, lv);
    const double r1 = (m.f - target) / target;
    const double r2 = m.s - s;
    if (std::abs(r1) < 1e-15 && std::abs(r2) < 1e-14) return {lc, lv};
    const double a = m.f_lc / target, b = m.f_lv / target;
    const double det = a * m.s_lv - b * m.s_lc;
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) {
      throw PreconditionError("singular Jacobian on the indifference curve: f is not strictly quasi-concave here");
    }
    double dlc = -(m.s_lv * r1 - b * r2) / det;
    double dlv = -(-m.s_lc * r1 + a * r2) / det;
    const double big = std::max(std::abs(dlc), std::abs(dlv));
    if (big > 0.5) {
      dlc *= 0.5 / big;
      dlv *= 0.5 / big;
    }
    lc += dlc;
    lv += dlv;
    if (std::max(std::abs(dlc), std::abs(dlv)) < 1e-15) return {lc, lv};
  }
  throw ConvergenceError("Newton iteration on the indifference curve did not converge");
}

TabulatedFunction::Value slice(const Environment& env, double alpha, double s) {
  const ContinuationPoint p = env.at(s, alpha);
  return {p.v, p.v_w, p.v_ww};
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double indifference_eis(const Aggregator& f, double c, double v, double step) {
  if (!(c > 0.0) || !(v > 0.0)) throw DomainError("EIS needs c > 0 and v > 0");
  const double lc = std::log(c), lv = std::log(v);
  const Mrs m0 = mrs(f, lc, lv);
  const auto up = solve_on_curve(f, m0.f, m0.s + step, lc, lv);
  const auto dn = solve_on_curve(f, m0.f, m0.s - step, lc, lv);
  const double ratio_up = up.first - up.second;
  const double ratio_dn = dn.first - dn.second;
  return -(ratio_up - ratio_dn) / (2.0 * step);
}

double optimal_consumption(const Environment& env, double w, double alpha) {
  const Choice ch = maximize_consumption(env.aggregator, w, [&](double s) { return slice(env, alpha, s); });
  if (!ch.interior) throw ConvergenceError("consumption optimum is at a corner (w = " + num(w) + ")");
  return ch.consumption;
}

double compute_eis(const Environment& env, double w, double alpha) {
  if (env.aggregator.family() != AggregatorFamily::Custom) return env.aggregator.psi();
  const double c = optimal_consumption(env, w, alpha);
  return indifference_eis(env.aggregator, c, env.at(w - c, alpha).v);
}

double compute_remv(const Environment& env, double w, double alpha) {
  const double c = optimal_consumption(env, w, alpha);
  if (env.homothetic()) {
    const auto [g, gd] = env.scale(alpha);
    if (gd == 0.0) throw DomainError("REMV undefined: the shock does not move the continuation value");
    const double e = gd / g;
    return e / e;
  }
  const ContinuationPoint p = env.at(w - c, alpha);
  if (p.v_alpha == 0.0) throw DomainError("REMV undefined: the shock does not move the continuation value");
  if (!(p.v_w > 0.0)) throw DomainError("REMV undefined: v_w must be positive");
  return (p.v_walpha / p.v_w) / (p.v_alpha / p.v);
}

double response_formula(const Environment& env, double w, double alpha) {
  const double c = optimal_consumption(env, w, alpha);
  const ContinuationPoint p = env.at(w - c, alpha);
  const double psi = env.aggregator.family() == AggregatorFamily::Custom
                         ? indifference_eis(env.aggregator, c, p.v)
                         : env.aggregator.psi();
  const double k = 1.0 / c + p.v_w / p.v - psi * p.v_ww / p.v_w;
  return (p.v_alpha / p.v - psi * p.v_walpha / p.v_w) / k;
}

ResponseReport consumption_response(const Environment& env, double w, double alpha) {
  ResponseReport r;
  r.w = w;
  r.alpha = alpha;
  r.grid_accuracy = env.grid_accuracy;
  r.c = optimal_consumption(env, w, alpha);
  const double s = w - r.c;
  const ContinuationPoint p = env.at(s, alpha);
  r.psi = env.aggregator.family() == AggregatorFamily::Custom ? indifference_eis(env.aggregator, r.c, p.v)
                                                             : env.aggregator.psi();
  if (env.homothetic()) {
    r.eps = compute_remv(env, w, alpha);
  } else {
    r.eps = p.v_alpha != 0.0 ? (p.v_walpha / p.v_w) / (p.v_alpha / p.v) : std::numeric_limits<double>::quiet_NaN();
  }
  r.coefficient = 1.0 / r.c + p.v_w / p.v - r.psi * p.v_ww / p.v_w;
  r.rhs = p.v_alpha / p.v - r.psi * p.v_walpha / p.v_w;
  r.c_alpha = r.rhs / r.coefficient;

  const double h = kAlphaStep * std::max(1.0, std::abs(alpha));
  auto c_at = [&](double a) { return optimal_consumption(env, w, a); };
  if (alpha - h >= env.alpha_lo && alpha + h <= env.alpha_hi) {
    r.c_alpha_fd = (c_at(alpha + h) - c_at(alpha - h)) / (2.0 * h);
  } else if (alpha + 2.0 * h <= env.alpha_hi) {
    r.c_alpha_fd = (-3.0 * r.c + 4.0 * c_at(alpha + h) - c_at(alpha + 2.0 * h)) / (2.0 * h);
  } else {
    r.c_alpha_fd = (3.0 * r.c - 4.0 * c_at(alpha - h) + c_at(alpha - 2.0 * h)) / (2.0 * h);
  }
  r.residual = r.coefficient * r.c_alpha_fd - r.rhs;

  r.concave = p.v_ww <= 0.0;
  r.smooth = !env.smooth_at || env.smooth_at(s, alpha);
  const double gap = std::isnan(r.eps) ? std::numeric_limits<double>::quiet_NaN() : 1.0 - r.eps * r.psi;
  r.knife_edge = std::isnan(gap) || std::abs(gap) <= kKnifeEdge;
  r.sign_pred = r.knife_edge ? 0 : sign_of(p.v_alpha) * sign_of(gap);
  r.sign_obs = sign_of(r.c_alpha_fd);
  r.asserted = r.concave && r.smooth && !r.knife_edge;
  r.agrees = !r.asserted || r.sign_pred == r.sign_obs;
  return r;
}

DiscreteResponse discrete_response(const Environment& env, double w, double alpha0, double alpha1,
                                   std::size_t n_steps) {
  DiscreteResponse out;
  if (alpha0 == alpha1) return out;
  if (n_steps == 0) throw PreconditionError("discrete response needs at least one panel");
  auto g = [&](double a) {
    ++out.evaluations;
    if (env.smooth_at) {
      const double c = optimal_consumption(env, w, a);
      if (!env.smooth_at(w - c, a)) {
        throw PreconditionError("regularity lost at alpha = " + num(a) + " (policy kink); integration aborted");
      }
    }
    return response_formula(env, w, a);
  };
  const double width = (alpha1 - alpha0) / static_cast<double>(n_steps);
  const double tol = 1e-10 / static_cast<double>(n_steps);
  double prev = g(alpha0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double a = alpha0 + width * static_cast<double>(i);
    const double b = i + 1 == n_steps ? alpha1 : a + width;
    const double fm = g(0.5 * (a + b));
    const double fb = g(b);
    const double whole = (b - a) / 6.0 * (prev + 4.0 * fm + fb);
    out.integral += adaptive_simpson(g, a, b, prev, fm, fb, whole, tol, 30);
    prev = fb;
  }
  out.direct = optimal_consumption(env, w, alpha1) - optimal_consumption(env, w, alpha0);
  out.agrees = std::abs(out.integral - out.direct) <= 1e-4;
  return out;
}

double monotone_lhs(const Environment& env, double w, double c, double alpha) {
  const ContinuationPoint p = env.at(w - c, alpha);
  const AggregatorPoint q = env.aggregator.evaluate(c, p.v);
  if (!(q.fcv > 0.0)) {
    throw PreconditionError("f_cv <= 0 at c = " + num(c) + ": the environment is not regular");
  }
  const double remv = (p.v_walpha * p.v) / (p.v_w * p.v_alpha);
  return (p.v_w / p.v) / (q.fc / q.f) * (remv + p.v * q.fvv / q.fv) * (q.fc * q.fv / (q.fcv * q.f));
}

std::string Certificate::verdict_name() const {
  switch (verdict) {
    case Verdict::Below:
      return "increasing";
    case Verdict::Above:
      return "decreasing";
    case Verdict::Mixed:
      return "mixed";
  }
  return "mixed";
}

Certificate monotone_condition(const Environment& env, Box w_box, Box alpha_box, const CertificateOptions& opt) {
  if (!(w_box.lo > 0.0) || w_box.hi < w_box.lo) throw PreconditionError("wealth box must be positive");
  if (alpha_box.lo < env.alpha_lo || alpha_box.hi > env.alpha_hi || alpha_box.hi < alpha_box.lo) {
    throw PreconditionError("alpha box outside the environment's admissible range");
  }
  if (!(opt.share.lo > 0.0) || !(opt.share.hi < 1.0) || opt.share.hi < opt.share.lo) {
    throw PreconditionError("consumption share box must lie inside (0, 1)");
  }
  auto ladder = [](Box b, std::size_t n, std::size_t i) {
    return n <= 1 ? b.lo : b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  Certificate cert;
  cert.homothetic = env.homothetic();
  cert.min_lhs = cert.min_simplified = std::numeric_limits<double>::infinity();
  cert.max_lhs = cert.max_simplified = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < opt.wealth_points; ++i) {
    const double w = ladder(w_box, opt.wealth_points, i);
    for (std::size_t j = 0; j < opt.share_points; ++j) {
      const double c = w * ladder(opt.share, opt.share_points, j);
      for (std::size_t k = 0; k < opt.alpha_points; ++k) {
        const double a = ladder(alpha_box, opt.alpha_points, k);
        const double lhs = monotone_lhs(env, w, c, a);
        cert.min_lhs = std::min(cert.min_lhs, lhs);
        cert.max_lhs = std::max(cert.max_lhs, lhs);
        if (cert.homothetic) {
          const AggregatorPoint q = env.aggregator.evaluate(c, env.at(w - c, a).v);
          const double simple = q.fv / (w * q.fcv);
          cert.min_simplified = std::min(cert.min_simplified, simple);
          cert.max_simplified = std::max(cert.max_simplified, simple);
        }
        ++cert.samples;
      }
    }
  }
  if (cert.max_lhs < 1.0 - opt.margin) {
    cert.verdict = Certificate::Verdict::Below;
    cert.margin = 1.0 - cert.max_lhs;
  } else if (cert.min_lhs > 1.0 + opt.margin) {
    cert.verdict = Certificate::Verdict::Above;
    cert.margin = cert.min_lhs - 1.0;
  }
  if (!opt.brute_force) return cert;

  // Brute force: argmax over a consumption scan refined by golden section.
  for (std::size_t i = 0; i < opt.wealth_points; ++i) {
    const double w = ladder(w_box, opt.wealth_points, i);
    double prev = 0.0;
    for (std::size_t k = 0; k < opt.ladder; ++k) {
      const double a = ladder(alpha_box, opt.ladder, k);
      auto h = [&](double c) { return env.aggregator.value(c, env.at(w - c, a).v); };
      std::size_t best = 0;
      double hb = -std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < opt.scan; ++m) {
        const double c = w * (static_cast<double>(m) + 0.5) / static_cast<double>(opt.scan);
        const double hv = h(c);
        if (hv > hb) {
          hb = hv;
          best = m;
        }
      }
      const double lo = w * (static_cast<double>(best) - 0.5) / static_cast<double>(opt.scan);
      const double hi = w * (static_cast<double>(best) + 1.5) / static_cast<double>(opt.scan);
      const double cstar = golden_section_max(h, std::max(lo, w * 1e-12), std::min(hi, w * (1.0 - 1e-12)), w * 1e-13);
      if (cstar < w * opt.share.lo || cstar > w * opt.share.hi) ++cert.outside_box;
      if (k > 0) {
        ++cert.comparisons;
        const double tol = 1e-9 * w;
        if (cert.verdict == Certificate::Verdict::Below && cstar < prev - tol) ++cert.violations;
        if (cert.verdict == Certificate::Verdict::Above && cstar > prev + tol) ++cert.violations;
      }
      prev = cstar;
    }
  }
  return cert;
}

}  // namespace eislab
