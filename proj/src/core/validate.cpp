#include "eislab/core/validate.hpp"

#include <cmath>

#include "eislab/core/distribution.hpp"
#include "eislab/core/error.hpp"

namespace eislab {
namespace {

void add(RegularityReport& r, std::string name, bool ok, Severity sev, std::string detail) {
  r.checks.push_back({std::move(name), ok, sev, ok ? std::string{} : std::move(detail)});
}

}  // namespace

const RegularityCheck* RegularityReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool RegularityReport::passed(const std::string& name) const {
  const auto* c = find(name);
  return c != nullptr && c->passed;
}

RegularityReport validate_setting(const Setting& s) {
  RegularityReport r;

  bool structure_ok = true;
  std::string structure_detail;
  try {
    check_setting(s);
  } catch (const Error& e) {
    structure_ok = false;
    structure_detail = e.what();
  }
  add(r, "structure", structure_ok, Severity::Error, structure_detail);

  bool discrete = !s.periods.empty();
  bool positive_states = true;
  std::string discrete_detail;
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const auto& tr = s.periods[t].next;
    const std::string p = probability_problem(tr.probs, 1e-12);
    if (!p.empty()) {
      discrete = false;
      discrete_detail = "period " + std::to_string(t) + ": " + p;
    }
    for (double q : tr.probs) positive_states = positive_states && q > 0.0;
  }
  add(r, "discrete_states", discrete, Severity::Error, discrete_detail);
  add(r, "positive_state_probabilities", positive_states, Severity::Warning,
      "zero-probability states present; they are irrelevant and may be pruned");

  bool portfolios = true;
  for (const auto& p : s.periods) portfolios = portfolios && p.next.portfolios() > 0;
  add(r, "discrete_portfolios", portfolios, Severity::Error, "a period has an empty portfolio set");

  bool smooth = true;
  bool inada = true;
  bool f_normalized = true;
  std::string smooth_detail;
  std::string inada_detail;
  for (std::size_t t = 0; t < s.periods.size(); ++t) {
    const Aggregator& f = s.periods[t].aggregator;
    try {
      const AggregatorCheck chk = check_aggregator(f);
      if (!chk.increasing || !chk.homogeneity || !chk.euler) {
        smooth = false;
        smooth_detail = "period " + std::to_string(t) + ": " + f.describe() + " fails sampled monotonicity/homogeneity";
      }
      if (f.value(0.0, 0.0) != 0.0) f_normalized = false;
    } catch (const Error& e) {
      smooth = false;
      smooth_detail = e.what();
    }
    if (!f.inada()) {
      inada = false;
      inada_detail = "period " + std::to_string(t) + ": " + f.describe() +
                     " lacks the Inada flag; interior consumption is not guaranteed";
    }
  }
  add(r, "aggregator_smooth_increasing", smooth, Severity::Error, smooth_detail);
  add(r, "aggregator_inada", inada, Severity::Warning, inada_detail);
  add(r, "aggregator_normalized", f_normalized, Severity::Error, "f(0, 0) != 0");

  add(r, "terminal_normalized", s.terminal.intercept == 0.0, Severity::Error,
      "terminal utility u_T(0) = " + std::to_string(s.terminal.intercept) + " != 0");

  bool ce_normalized = true;
  bool ce_smooth = true;
  for (const auto& p : s.periods) {
    // M(0) = 0 where phi(0) is finite; otherwise as the limit of degenerate
    // distributions at x -> 0.
    const std::vector<double> probs = p.next.probs;
    for (double x : {0.0, 1e-12, 1.0}) {
      if (x == 0.0 && !p.ce.risk().defined_at_zero()) continue;
      std::vector<double> vals(probs.size(), x);
      try {
        if (std::abs(p.ce.evaluate(vals, probs) - x) > 1e-12 * std::max(1.0, x)) ce_normalized = false;
      } catch (const Error&) {
        ce_normalized = false;
      }
    }
    ce_smooth = ce_smooth && p.ce.smooth();
  }
  add(r, "certainty_equivalent_normalized", ce_normalized, Severity::Error, "M(0) != 0");
  add(r, "certainty_equivalent_smooth", ce_smooth, Severity::Warning,
      "multi-prior certainty equivalent is only piecewise smooth at prior switches");

  const bool wealth_normalized = !s.income.has_value() || s.income->initial_permanent == 0.0;
  add(r, "wealth_normalized", wealth_normalized, Severity::Warning,
      "income makes W(0, theta) = p tau > 0");

  bool all = true;
  for (const auto& c : r.checks) all = all && c.passed;
  r.strongly_regular = all;
  return r;
}

}  // namespace eislab
