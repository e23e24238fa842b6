#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "eislab/core/aggregator.hpp"
#include "eislab/core/certainty_equivalent.hpp"
#include "eislab/core/setting.hpp"

namespace testsupport {

using namespace eislab;

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// CES aggregator written out independently of the library, exposed as an opaque handle.
class OpaqueCes final : public AggregatorModel {
 public:
  OpaqueCes(double beta, double psi) : b_(beta), r_(1.0 - 1.0 / psi) {}
  AggregatorPoint evaluate(double c, double v) const override {
    const double a = (1.0 - b_) * std::pow(c, r_), d = b_ * std::pow(v, r_);
    const double f = std::pow(a + d, 1.0 / r_);
    AggregatorPoint p;
    p.f = f;
    p.fc = (1.0 - b_) * std::pow(c, r_ - 1.0) * std::pow(a + d, 1.0 / r_ - 1.0);
    p.fv = b_ * std::pow(v, r_ - 1.0) * std::pow(a + d, 1.0 / r_ - 1.0);
    const double k = (1.0 - r_) * std::pow(a + d, 1.0 / r_ - 2.0);
    p.fcc = -(1.0 - b_) * k * std::pow(c, r_ - 2.0) * d;
    p.fvv = -b_ * k * std::pow(v, r_ - 2.0) * a;
    p.fcv = (1.0 - b_) * b_ * k * std::pow(c, r_ - 1.0) * std::pow(v, r_ - 1.0);
    return p;
  }
  bool homogeneous_degree_one() const override { return true; }
  bool inada() const override { return r_ < 1.0; }
  std::string describe() const override { return "opaque-ces"; }

 private:
  double b_, r_;
};

// log of a CES aggregator: a monotone transformation of a homogeneous f.
class LogCes final : public AggregatorModel {
 public:
  LogCes(double beta, double psi) : ces_(beta, psi) {}
  AggregatorPoint evaluate(double c, double v) const override {
    const AggregatorPoint q = ces_.evaluate(c, v);
    AggregatorPoint p;
    p.f = std::log(q.f) + 10.0;
    p.fc = q.fc / q.f;
    p.fv = q.fv / q.f;
    p.fcc = q.fcc / q.f - q.fc * q.fc / (q.f * q.f);
    p.fvv = q.fvv / q.f - q.fv * q.fv / (q.f * q.f);
    p.fcv = q.fcv / q.f - q.fc * q.fv / (q.f * q.f);
    return p;
  }
  bool homogeneous_degree_one() const override { return false; }
  bool inada() const override { return true; }
  std::string describe() const override { return "log-ces"; }

 private:
  OpaqueCes ces_;
};

inline CertaintyEquivalent crra(double gamma) { return CertaintyEquivalent::quasi_arithmetic(Curvature::crra(gamma)); }

// T periods, identical Epstein-Zin preferences and transition.
inline Setting simple_setting(std::size_t T, double beta, double psi, double gamma, std::vector<double> probs,
                              std::vector<std::vector<double>> returns) {
  Setting s;
  Transition tr;
  tr.probs = std::move(probs);
  tr.returns = std::move(returns);
  for (std::size_t t = 0; t < T; ++t) s.periods.push_back(Period{Aggregator::epstein_zin(beta, psi), crra(gamma), tr});
  return s;
}

// Four-state portfolio problem with a risk-free asset and two risky mixes.
inline Setting portfolio_setting(std::size_t T, double beta, double psi, double gamma) {
  return simple_setting(T, beta, psi, gamma, {0.2, 0.3, 0.3, 0.2},
                        {{1.03, 1.03, 1.03, 1.03}, {0.9, 1.0, 1.1, 1.25}, {0.75, 0.95, 1.2, 1.45}});
}

inline Setting income_setting(std::size_t T, double beta, double psi, double gamma) {
  Setting s = simple_setting(T, beta, psi, gamma, {0.25, 0.25, 0.25, 0.25},
                             {{1.02, 1.02, 1.02, 1.02}, {0.85, 1.0, 1.1, 1.3}});
  for (auto& p : s.periods) p.next.income = IncomeShocks{{0.6, 1.2, 0.9, 1.1}, {0.95, 1.0, 1.05, 1.0}};
  s.income = IncomeBlock{1.0, true};
  return s;
}

}  // namespace testsupport
