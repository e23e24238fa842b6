#include "eislab/solver/solution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "eislab/core/error.hpp"
#include "eislab/numerics/optimize.hpp"

namespace eislab {
namespace {

constexpr double kKinkSlopeJump = 1e-2;

std::string out_of_range(double x, double lo, double hi) {
  std::ostringstream os;
  os.precision(10);
  os << "interpolation out of range: " << x << " leaves the grid [" << lo << ", " << hi << "]";
  return os.str();
}

// Index i with nodes[i] <= x < nodes[i + 1], clamped to [0, n - 2].
std::size_t bracket(const std::vector<double>& nodes, double x) {
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  auto i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
  return std::clamp<std::size_t>(i, 1, nodes.size() - 1) - 1;
}

}  // namespace

TabulatedFunction::TabulatedFunction(std::vector<double> x, std::vector<double> y, double y_at_zero,
                                     Interpolation order)
    : x_(std::move(x)), y_(std::move(y)), y0_(y_at_zero), order_(order) {
  if (x_.size() < 2 || y_.size() != x_.size()) throw DimensionError("tabulated function needs >= 2 matching nodes");
  if (!(x_.front() > 0.0)) throw DomainError("tabulated function nodes must be positive");
  if (!(y0_ >= 0.0)) throw DomainError("tabulated function value at zero must be nonnegative");
  std::vector<double> lx(x_.size()), ly(y_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!(y_[i] > 0.0) || !std::isfinite(y_[i])) {
      throw DomainError("tabulated values must be positive and finite for log interpolation");
    }
    lx[i] = std::log(x_[i]);
    ly[i] = std::log(y_[i]);
  }
  log_ = MonotoneCubic(std::move(lx), std::move(ly));
}

TabulatedFunction::Value TabulatedFunction::inside(double x) const {
  const double lx = std::log(x);
  double Y, dY, d2Y;
  if (order_ == Interpolation::MonotoneCubic) {
    const auto v = log_.eval(lx);
    Y = v.y;
    dY = v.dy;
    d2Y = v.d2y;
  } else {
    const auto& kx = log_.knots();
    const auto& ky = log_.values();
    const std::size_t i = bracket(kx, lx);
    dY = (ky[i + 1] - ky[i]) / (kx[i + 1] - kx[i]);
    Y = ky[i] + dY * (lx - kx[i]);
    d2Y = 0.0;
  }
  Value out;
  out.y = std::exp(Y);
  out.dy = out.y * dY / x;
  out.d2y = out.y * (d2Y + dY * dY - dY) / (x * x);
  return out;
}

TabulatedFunction::Value TabulatedFunction::eval(double x) const {
  const double x0 = x_.front();
  const double xn = x_.back();
  if (x > xn * (1.0 + 1e-12)) throw DomainError(out_of_range(x, x0, xn));
  if (x >= x0) return inside(std::min(x, xn));
  if (x < 0.0) throw DomainError(out_of_range(x, 0.0, xn));
  const Value a = inside(x0);
  if (y0_ == 0.0) {
    if (x == 0.0) return {0.0, 0.0, 0.0};
    const double k = a.dy * x0 / a.y;
    Value out;
    out.y = a.y * std::pow(x / x0, k);
    out.dy = k * out.y / x;
    out.d2y = k * (k - 1.0) * out.y / (x * x);
    return out;
  }
  const double q = (a.dy * x0 - (a.y - y0_)) / (x0 * x0);
  const double l = a.dy - 2.0 * q * x0;
  return {y0_ + l * x + q * x * x, l + 2.0 * q * x, 2.0 * q};
}

double Solution::initial_permanent() const {
  return setting_ && setting_->income ? setting_->income->initial_permanent : 1.0;
}

TabulatedFunction::Value Solution::rows_eval(const std::vector<double>& permanent,
                                             const std::vector<TabulatedFunction>& rows, double x, double p) const {
  if (permanent.empty()) return rows.at(0).eval(x);
  const double lo = permanent.front(), hi = permanent.back();
  if (p < lo * (1.0 - 1e-12) || p > hi * (1.0 + 1e-12)) {
    throw DomainError("permanent income " + std::to_string(p) + " outside the solved range");
  }
  // Cubic Lagrange interpolation in log p over the four surrounding rows.
  const std::size_t n = permanent.size();
  const std::size_t i = bracket(permanent, p);
  const std::size_t first = std::min(i > 0 ? i - 1 : 0, n - 4);
  const double q = std::log(p);
  std::array<double, 4> lq{};
  for (std::size_t k = 0; k < 4; ++k) lq[k] = std::log(permanent[first + k]);
  TabulatedFunction::Value out;
  for (std::size_t k = 0; k < 4; ++k) {
    double w = 1.0;
    for (std::size_t m = 0; m < 4; ++m) {
      if (m != k) w *= (q - lq[m]) / (lq[k] - lq[m]);
    }
    const auto v = rows[first + k].eval(x);
    out.y += w * v.y;
    out.dy += w * v.dy;
    out.d2y += w * v.d2y;
  }
  return out;
}

double Solution::value(std::size_t t, double w, double p) const {
  if (!tabulated()) return b_.at(t) * w;
  const PeriodTables& tb = periods_.at(t);
  if (plan_.reduced) return p * tb.value.at(0)(w / p);
  return rows_eval(tb.permanent, tb.value, w, p).y;
}

ContinuationPoint Solution::continuation(std::size_t t, double s, double p) const {
  if (!tabulated()) return {g_.at(t) * s, g_.at(t), 0.0, 0.0, 0.0};
  const PeriodTables& tb = periods_.at(t);
  if (plan_.reduced) {
    const auto v = tb.continuation.at(0).eval(s / p);
    return {p * v.y, v.dy, v.d2y / p, 0.0, 0.0};
  }
  const auto v = rows_eval(tb.permanent, tb.continuation, s, p);
  return {v.y, v.dy, v.d2y, 0.0, 0.0};
}

double Solution::next_value(std::size_t t, double w, double p, std::size_t state) const {
  if (t + 1 == horizon()) return setting_->terminal.value(w, state);
  if (plan_.reduced) return periods_.at(t + 1).value.at(0)(w);
  return value(t + 1, w, p);
}

std::pair<double, std::size_t> Solution::best_portfolio(std::size_t t, double s, double p) const {
  const Period& per = setting_->periods.at(t);
  const Transition& tr = per.next;
  const std::size_t n = tr.states();
  std::vector<double> u(n);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t th = 0; th < tr.portfolios(); ++th) {
    for (std::size_t k = 0; k < n; ++k) {
      const double r = tr.returns[th][k];
      if (!tr.income) {
        u[k] = next_value(t, r * s, 1.0, k);
      } else if (plan_.reduced) {
        const double eta = tr.income->permanent[k];
        u[k] = eta * next_value(t, r * s / eta + tr.income->transitory[k], 1.0, k);
      } else {
        const double eta = tr.income->permanent[k];
        u[k] = next_value(t, r * s + p * eta * tr.income->transitory[k], p * eta, k);
      }
    }
    const double m = per.ce.evaluate(u, tr.probs);
    if (m > best) {
      best = m;
      arg = th;
    }
  }
  return {best, arg};
}

Choice maximize_consumption(const Aggregator& f, double w,
                            const std::function<TabulatedFunction::Value(double)>& v) {
  if (!(w > 0.0)) throw DomainError("consumption choice needs positive wealth");
  auto h = [&](double c) { return f.value(c, v(w - c).y); };
  auto dh = [&](double c) {
    const auto cv = v(w - c);
    const auto q = f.evaluate(c, cv.y);
    return q.fc - q.fv * cv.dy;
  };
  const ScalarMaximum m = maximize_scalar(h, dh, w * 1e-12, w * (1.0 - 1e-12));
  Choice out;
  out.consumption = m.x;
  out.value = m.value;
  out.interior = !m.at_lower && !m.at_upper;
  return out;
}

Choice Solution::choose(std::size_t t, double w, double p) const {
  if (!tabulated()) {
    Choice c{share_.at(t) * w, b_.at(t) * w, theta_.at(t), true};
    return c;
  }
  const Aggregator& f = setting_->periods.at(t).aggregator;
  Choice out;
  if (plan_.reduced) {
    const TabulatedFunction& v = periods_.at(t).continuation.at(0);
    out = maximize_consumption(f, w / p, [&](double s) { return v.eval(s); });
    out.consumption *= p;
    out.value *= p;
    out.portfolio = best_portfolio(t, w / p - out.consumption / p).second;
    return out;
  }
  out = maximize_consumption(f, w, [&](double s) {
    const ContinuationPoint c = continuation(t, s, p);
    return TabulatedFunction::Value{c.v, c.v_w, c.v_ww};
  });
  out.portfolio = best_portfolio(t, w - out.consumption, p).second;
  return out;
}

bool Solution::smooth_at(std::size_t t, double s, double p) const {
  if (!tabulated()) return true;
  const PeriodTables& tb = periods_.at(t);
  std::size_t row = 0;
  double x = s;
  if (plan_.reduced) {
    x = s / p;
  } else if (!tb.permanent.empty()) {
    row = bracket(tb.permanent, p);
    if (p - tb.permanent[row] > tb.permanent[row + 1] - p) ++row;
  }
  const TabulatedFunction& v = tb.continuation.at(row);
  const auto& nodes = v.nodes();
  if (x < nodes.front() || x > nodes.back()) return true;
  const std::size_t n = nodes.size();
  const std::size_t j = bracket(nodes, x);
  const std::size_t lo = j > 0 ? j - 1 : 0;
  const std::size_t hi = std::min(j + 2, n - 1);
  const auto& theta = tb.continuation_portfolio.at(row);
  for (std::size_t i = lo; i < hi; ++i) {
    if (theta[i] != theta[i + 1]) return false;
  }
  auto slope = [&](std::size_t i) {
    return std::log(v.values()[i + 1] / v.values()[i]) / std::log(nodes[i + 1] / nodes[i]);
  };
  for (std::size_t i = lo; i + 2 <= hi; ++i) {
    if (std::abs(slope(i + 1) - slope(i)) > kKinkSlopeJump) return false;
  }
  return true;
}

Solution make_homothetic_solution(std::shared_ptr<const Setting> s, std::vector<double> b, std::vector<double> g,
                                  std::vector<double> share, std::vector<std::size_t> theta) {
  Solution out;
  out.setting_ = std::move(s);
  out.b_ = std::move(b);
  out.g_ = std::move(g);
  out.share_ = std::move(share);
  out.theta_ = std::move(theta);
  return out;
}

Solution make_tabulated_solution(std::shared_ptr<const Setting> s, GridPlan plan, std::vector<PeriodTables> periods) {
  Solution out;
  out.setting_ = std::move(s);
  out.plan_ = std::move(plan);
  out.periods_ = std::move(periods);
  return out;
}

SolutionBuilder::SolutionBuilder(std::shared_ptr<const Setting> s, GridPlan plan) {
  const std::size_t T = s->horizon();
  sol_ = make_tabulated_solution(std::move(s), std::move(plan), std::vector<PeriodTables>(T));
  lowest_ = T;
}

void SolutionBuilder::set(std::size_t t, PeriodTables tables) {
  if (t + 1 != lowest_) throw PreconditionError("periods must be filled from T-1 downwards");
  sol_.periods_[t] = std::move(tables);
  lowest_ = t;
}

Solution SolutionBuilder::finish() && {
  if (lowest_ != 0) throw PreconditionError("solution is missing early periods");
  return std::move(sol_);
}

ContinuationPoint continuation_value(const Solution& at_alpha0, const Solution& at_alpha1, const ShockPath& path,
                                     std::size_t t, double s, double alpha, double p) {
  path.weight(alpha);
  return path.combine(at_alpha0.continuation(t, s, p), at_alpha1.continuation(t, s, p), alpha);
}

Environment path_environment(std::shared_ptr<const Solution> at_alpha0, std::shared_ptr<const Solution> at_alpha1,
                             const ShockPath& path, std::size_t t, double p) {
  Environment env{at_alpha0->setting().periods.at(t).aggregator, {}, {}, {}, std::min(path.alpha0, path.alpha1),
                  std::max(path.alpha0, path.alpha1), at_alpha0->tabulated() || at_alpha1->tabulated()};
  env.continuation = [a0 = at_alpha0, a1 = at_alpha1, path, t, p](double s, double alpha) {
    return continuation_value(*a0, *a1, path, t, s, alpha, p);
  };
  if (!at_alpha0->tabulated() && !at_alpha1->tabulated()) {
    const double g0 = at_alpha0->g().at(t), g1 = at_alpha1->g().at(t);
    env.scale = [path, g0, g1](double alpha) {
      const double l = path.weight(alpha);
      return std::make_pair(l * g1 + (1.0 - l) * g0, (g1 - g0) / (path.alpha1 - path.alpha0));
    };
  } else {
    env.smooth_at = [a0 = at_alpha0, a1 = at_alpha1, t, p](double s, double) {
      return a0->smooth_at(t, s, p) && a1->smooth_at(t, s, p);
    };
  }
  return env;
}

}  // namespace eislab
