#include "eislab/twoperiod/two_period.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eislab/core/error.hpp"
#include "eislab/numerics/optimize.hpp"

namespace eislab {
namespace {

constexpr double kSignTol = 1e-6;
constexpr double kFdStep = 1e-5;

int sign_with_tol(double x, double tol) {
  if (std::abs(x) <= tol) return 0;
  return x > 0.0 ? 1 : -1;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

TwoPeriodSolution finish(const TwoPeriodProblem& p, double c1, bool closed) {
  TwoPeriodSolution s;
  s.c1 = c1;
  s.c2 = p.rf * (p.e1 - c1) + p.e2;
  s.utility = p.aggregator.value(c1, p.rho * s.c2);
  s.closed_form = closed;
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

void check_problem(const TwoPeriodProblem& p) {
  if (!(p.e1 >= 0.0) || !(p.e2 >= 0.0)) throw PreconditionError("endowments must be nonnegative");
  if (!(p.rf > 0.0)) throw PreconditionError("risk-free rate must be positive");
  if (!(p.rho > 0.0)) throw PreconditionError("continuation scale rho must be positive");
  if (!(p.lifetime_wealth() > 0.0)) throw PreconditionError("lifetime wealth must be positive");
}

TwoPeriodSolution solve_two_period(const TwoPeriodProblem& p) {
  check_problem(p);
  if (p.aggregator.family() == AggregatorFamily::Custom) return solve_two_period_numeric(p);
  const double beta = p.aggregator.beta();
  const double psi = p.aggregator.psi();
  const double a = std::pow(1.0 - beta, psi);
  const double c1 = a * p.lifetime_wealth() / (a + std::pow(beta, psi) * std::pow(p.rho * p.rf, psi - 1.0));
  return finish(p, c1, true);
}

TwoPeriodSolution solve_two_period_numeric(const TwoPeriodProblem& p) {
  check_problem(p);
  const double L = p.lifetime_wealth();
  const double k = p.rho * p.rf;
  const Aggregator& f = p.aggregator;
  auto v_of = [&](double c) { return p.rho * (p.rf * (p.e1 - c) + p.e2); };
  auto h = [&](double c) { return f.value(c, std::max(v_of(c), 0.0)); };
  auto dh = [&](double c) {
    const auto q = f.evaluate(c, v_of(c));
    return q.fc - k * q.fv;
  };
  const double lo = L * 1e-12;
  const double hi = L * (1.0 - 1e-12);
  MaximizeOptions opt;
  opt.scan_points = 96;
  const ScalarMaximum m = maximize_scalar(h, dh, lo, hi, opt);
  if (m.local_maxima > 1) {
    throw PreconditionError("aggregator is not quasi-concave: " + std::to_string(m.local_maxima) +
                            " local maxima on the budget line");
  }
  if (m.at_lower || m.at_upper) {
    throw ConvergenceError("two-period optimum at the corner c1 = " + fmt(m.x) + "; no interior solution");
  }
  const double foc = dh(m.x);
  const double scale = f.evaluate(m.x, v_of(m.x)).fc;
  if (std::abs(foc) > 1e-6 * scale) {
    throw ConvergenceError("first-order condition residual " + fmt(foc / scale) + " exceeds tolerance");
  }
  return finish(p, m.x, false);
}

TwoPeriodSigns two_period_signs(const TwoPeriodProblem& p) {
  const TwoPeriodSolution sol = solve_two_period(p);
  const double L = p.lifetime_wealth();
  const double s = p.e1 - sol.c1;
  if (std::abs(s) <= 1e-14 * L) throw PreconditionError("epsilon undefined: the agent neither saves nor borrows (e1 = c)");

  TwoPeriodSigns out;
  const double v = p.rho * sol.c2;
  const AggregatorPoint q = p.aggregator.evaluate(sol.c1, v);
  out.psi = p.aggregator.family() == AggregatorFamily::Custom ? local_eis(q, sol.c1, v) : p.aggregator.psi();
  out.epsilon = (s + p.e2 / p.rf) / s;
  out.dc_drho_sign = sign_with_tol(1.0 - out.psi, kSignTol);
  out.dc_drf_sign = sign_with_tol(1.0 - out.epsilon * out.psi, kSignTol) * sign_of(s);

  // Implicit differentiation of G = f_c(c, v) - rho rf f_v(c, v), v = rho c2.
  const double k = p.rho * p.rf;
  const double g_c = q.fcc - 2.0 * k * q.fcv + k * k * q.fvv;
  const double g_rho = q.fcv * sol.c2 - p.rf * q.fv - k * q.fvv * sol.c2;
  const double g_rf = p.rho * (q.fcv * s - q.fv - k * q.fvv * s);
  out.dc_drho = -g_rho / g_c;
  out.dc_drf = -g_rf / g_c;

  auto resolve = [&](double rho, double rf) {
    TwoPeriodProblem q2 = p;
    q2.rho = rho;
    q2.rf = rf;
    return solve_two_period(q2).c1;
  };
  const double hr = kFdStep * p.rho;
  const double hf = kFdStep * p.rf;
  out.dc_drho_fd = (resolve(p.rho + hr, p.rf) - resolve(p.rho - hr, p.rf)) / (2.0 * hr);
  out.dc_drf_fd = (resolve(p.rho, p.rf + hf) - resolve(p.rho, p.rf - hf)) / (2.0 * hf);
  out.rho_agrees = out.dc_drho_sign == 0 || sign_of(out.dc_drho_fd) == out.dc_drho_sign;
  out.rf_agrees = out.dc_drf_sign == 0 || sign_of(out.dc_drf_fd) == out.dc_drf_sign;
  return out;
}

Figure1Data figure1_data(double beta, const std::vector<double>& psis, const std::vector<double>& rates,
                         int resolution, double e1, double e2) {
  if (psis.empty() || rates.empty()) throw PreconditionError("figure1 needs at least one psi and one rate");
  if (resolution < 2) throw PreconditionError("figure1 resolution must be at least 2");
  Figure1Data out;
  const double rf_max = *std::max_element(rates.begin(), rates.end());
  for (double psi : psis) {
    const std::string panel = "psi=" + fmt(psi);
    const Aggregator f = Aggregator::epstein_zin(beta, psi);
    for (double rf : rates) {
      TwoPeriodProblem p{e1, e2, rf, 1.0, f};
      const TwoPeriodSolution sol = solve_two_period(p);
      const double L = p.lifetime_wealth();
      const std::string tag = "_Rf=" + fmt(rf);
      for (int i = 0; i < resolution; ++i) {
        const double c = L * static_cast<double>(i) / (resolution - 1);
        out.rows.push_back({panel, "budget" + tag, c, rf * (e1 - c) + e2});
      }
      out.rows.push_back({panel, "optimum" + tag, sol.c1, sol.c2});
      out.optima.push_back({psi, rf, sol.c1, sol.c2});

      // Indifference curve: for each c solve f(c, v) = U* for v (increasing in v).
      const double v_cap = 4.0 * rf_max * (e1 + e2 / *std::min_element(rates.begin(), rates.end()));
      for (int i = 1; i <= resolution; ++i) {
        const double c = L * static_cast<double>(i) / resolution;
        auto g = [&](double v) { return f.value(c, v) - sol.utility; };
        if (g(0.0) >= 0.0 || g(v_cap) < 0.0) continue;
        out.rows.push_back({panel, "indifference" + tag, c, bisect_increasing(g, 0.0, v_cap)});
      }
    }
  }
  return out;
}

}  // namespace eislab
