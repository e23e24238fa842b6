#include "eislab/shocks/verify.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "eislab/core/error.hpp"
#include "eislab/solver/homothetic.hpp"

namespace eislab {
namespace {

constexpr double kRemvTol = 1e-5;

// v and its savings-derivative along the path, plus p-derivatives by central
// differences (relative step 1e-4).
struct PathPoint {
  double v, v_w, v_a, v_wa, v_p, v_pa;
};

PathPoint path_point(const Solution& base, const Solution& shocked, std::size_t t, double s, double p,
                     double alpha) {
  const ContinuationPoint b = base.continuation(t, s, p);
  const ContinuationPoint z = shocked.continuation(t, s, p);
  const double h = 1e-4 * p;
  auto vp = [&](const Solution& sol) {
    return (sol.continuation(t, s, p + h).v - sol.continuation(t, s, p - h).v) / (2.0 * h);
  };
  const double vp_b = vp(base), vp_z = vp(shocked);
  PathPoint out;
  out.v = alpha * b.v + (1.0 - alpha) * z.v;
  out.v_w = alpha * b.v_w + (1.0 - alpha) * z.v_w;
  out.v_a = b.v - z.v;
  out.v_wa = b.v_w - z.v_w;
  out.v_p = alpha * vp_b + (1.0 - alpha) * vp_z;
  out.v_pa = vp_b - vp_z;
  return out;
}

double formula(const PathPoint& q, double s, double p) {
  return (1.0 + (p / s) * (q.v_p / q.v_w)) / (1.0 + (p / s) * (q.v_pa / q.v_wa));
}

Setting without_income(const Setting& s) {
  Setting out = s;
  out.income.reset();
  for (auto& per : out.periods) per.next.income.reset();
  return out;
}

}  // namespace

bool value_functions_concave(const Solution& sol) {
  if (!sol.tabulated()) return true;
  for (std::size_t t = 0; t < sol.horizon(); ++t) {
    for (const auto& V : sol.tables(t).value) {
      const auto& x = V.nodes();
      const auto& y = V.values();
      double prev = INFINITY;
      if (V.at_zero() >= 0.0) prev = (y[0] - V.at_zero()) / x[0];
      for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if (slope > prev + 1e-9 * std::abs(prev)) return false;
        prev = slope;
      }
    }
  }
  return true;
}

DropReport compare_continuations(const Solution& baseline, const Solution& shocked, bool requires_concavity,
                                 double tol) {
  if (baseline.horizon() != shocked.horizon()) throw PreconditionError("solutions have different horizons");
  DropReport r;
  r.concavity_required = requires_concavity;
  if (requires_concavity) {
    r.concave = value_functions_concave(baseline) && value_functions_concave(shocked);
    if (!r.concave) r.warnings.push_back("value functions are not concave; SOSD drop is not implied");
  }
  r.worst_excess = -INFINITY;
  for (std::size_t t = 0; t < baseline.horizon(); ++t) {
    const PeriodTables& b = baseline.tables(t);
    const PeriodTables& z = shocked.tables(t);
    if (b.continuation.size() != z.continuation.size()) throw PreconditionError("solutions use different grid plans");
    for (std::size_t row = 0; row < b.continuation.size(); ++row) {
      const auto& nb = b.continuation[row].nodes();
      const auto& nz = z.continuation[row].nodes();
      if (nb != nz) throw PreconditionError("solutions use different grid plans");
      for (std::size_t j = 0; j < nb.size(); ++j) {
        const double vb = b.continuation[row].values()[j];
        const double vz = z.continuation[row].values()[j];
        ++r.nodes;
        const double excess = vz - vb;
        if (excess > r.worst_excess) {
          r.worst_excess = excess;
          r.worst_period = t;
          r.worst_savings = nb[j];
        }
        if (excess > tol * (1.0 + std::abs(vb))) ++r.violations;
      }
    }
  }
  r.passed = r.violations == 0;
  if (!r.passed && requires_concavity && !r.concave) {
    r.downgraded = true;
    r.passed = true;
    std::ostringstream os;
    os << r.violations << " nodes above baseline (concavity hypothesis failed; reported as warning)";
    r.warnings.push_back(os.str());
  }
  return r;
}

DropReport verify_continuation_drop(const Setting& baseline, const Setting& shocked, const WealthGrid& grid,
                                    bool requires_concavity, const SolveOptions& opt) {
  const GridPlan plan = plan_grids({&baseline, &shocked}, grid, opt.income, opt.permanent_nodes);
  const Solution b = solve_backward(baseline, plan, opt);
  const Solution z = solve_backward(shocked, plan, opt);
  return compare_continuations(b, z, requires_concavity);
}

RemvCheck income_remv_check(const Solution& baseline, const Solution& shocked, std::size_t t, double s, double p,
                            double alpha) {
  if (!(s > 0.0)) throw PreconditionError("REMV check needs positive savings");
  RemvCheck out;
  out.savings = s;
  out.permanent = p;
  if (p == 0.0) throw PreconditionError("use the homothetic route for p = 0");
  const PathPoint q = path_point(baseline, shocked, t, s, p, alpha);
  if (q.v_a == 0.0) throw DomainError("REMV undefined: the shock does not move the continuation value");
  out.eps_direct = (q.v_wa / q.v_w) / (q.v_a / q.v);
  out.eps_formula = formula(q, s, p);
  out.agrees = std::abs(out.eps_direct - out.eps_formula) <= kRemvTol;
  for (double ratio : {0.5, 0.2, 0.1, 0.05, 0.02, 0.01}) {
    if (ratio >= p / s) continue;
    const double pp = ratio * s;
    try {
      out.limit.emplace_back(ratio, formula(path_point(baseline, shocked, t, s, pp, alpha), s, pp));
    } catch (const DomainError&) {
      break;  // s / p left the solved range
    }
  }
  return out;
}

RemvCheck income_remv_check(const Setting& s, const Shock& sh, double savings, double p, const WealthGrid& grid,
                            std::size_t t) {
  if (!s.income) throw PreconditionError("REMV income check needs an income block");
  if (!income_reducible(s)) {
    throw PreconditionError("income REMV check needs homogeneous aggregators, CRRA certainty equivalents and a "
                            "terminal utility without intercept");
  }
  const Setting shocked = apply_shock(s, sh);
  if (p == 0.0) {
    // No income: homothetic, v = g(alpha) s, and both expressions are 1.
    const Solution b = solve_homothetic(without_income(s));
    const Solution z = solve_homothetic(without_income(shocked));
    RemvCheck out;
    out.savings = savings;
    const double ga = b.g().at(t) - z.g().at(t);
    const double g = 0.5 * (b.g().at(t) + z.g().at(t));
    if (ga == 0.0) throw DomainError("REMV undefined: the shock does not move the continuation value");
    out.eps_direct = (ga / g) / (ga / g);
    out.eps_formula = (1.0 + 0.0) / (1.0 + 0.0);
    out.agrees = out.eps_direct == out.eps_formula;
    return out;
  }
  SolveOptions opt;
  opt.income = IncomeMode::Reduced;
  const GridPlan plan = plan_grids({&s, &shocked}, grid, IncomeMode::Reduced);
  const Solution b = solve_backward(s, plan, opt);
  const Solution z = solve_backward(shocked, plan, opt);
  return income_remv_check(b, z, t, savings, p);
}

}  // namespace eislab
