#include "eislab/solver/homothetic.hpp"

#include <cmath>
#include <memory>

#include "eislab/core/error.hpp"
#include "eislab/numerics/optimize.hpp"

namespace eislab {

bool homothetic_setting(const Setting& s, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (s.income) return fail("income block makes the value function non-linear in wealth");
  if (s.terminal.intercept != 0.0) return fail("terminal utility has an intercept");
  for (std::size_t t = 0; t < s.horizon(); ++t) {
    const Period& p = s.periods[t];
    if (!p.aggregator.homogeneous_degree_one()) {
      return fail("aggregator of period " + std::to_string(t) + " is not homogeneous of degree one");
    }
    if (!p.ce.homogeneous_degree_one()) {
      return fail("certainty equivalent of period " + std::to_string(t) + " is not homogeneous of degree one");
    }
    if (p.next.income) return fail("period " + std::to_string(t) + " carries income shocks");
  }
  return true;
}

HomotheticStep homothetic_step(const Aggregator& f, double g) {
  if (!(g > 0.0)) throw DomainError("homothetic step needs g > 0");
  HomotheticStep out;
  switch (f.family()) {
    case AggregatorFamily::CobbDouglas: {
      const double beta = f.beta();
      out.b = std::pow(1.0 - beta, 1.0 - beta) * std::pow(beta, beta) * std::pow(g, beta);
      out.share = 1.0 - beta;
      return out;
    }
    case AggregatorFamily::EpsteinZin: {
      const double beta = f.beta(), psi = f.psi();
      const double a = std::pow(1.0 - beta, psi);
      out.b = std::pow(a + std::pow(beta, psi) * std::pow(g, psi - 1.0), 1.0 / (psi - 1.0));
      out.share = a * std::pow(out.b, 1.0 - psi);
      return out;
    }
    case AggregatorFamily::Custom: {
      auto h = [&](double x) { return f.value(x, (1.0 - x) * g); };
      auto dh = [&](double x) {
        const auto q = f.evaluate(x, (1.0 - x) * g);
        return q.fc - g * q.fv;
      };
      const ScalarMaximum m = maximize_scalar(h, dh, 1e-12, 1.0 - 1e-12);
      if (m.local_maxima > 1) throw PreconditionError("aggregator is not quasi-concave along the budget line");
      out.b = m.value;
      out.share = m.x;
      return out;
    }
  }
  return out;
}

Solution solve_homothetic(const Setting& s) {
  check_setting(s);
  std::string why;
  if (!homothetic_setting(s, &why)) throw PreconditionError("setting is not homothetic: " + why);
  const std::size_t T = s.horizon();
  std::vector<double> b(T), g(T), share(T);
  std::vector<std::size_t> theta(T);
  for (std::size_t t = T; t-- > 0;) {
    const Period& per = s.periods[t];
    const Transition& tr = per.next;
    std::vector<double> u(tr.states());
    double best = -1.0;
    for (std::size_t th = 0; th < tr.portfolios(); ++th) {
      for (std::size_t k = 0; k < tr.states(); ++k) {
        const double coef = t + 1 == T ? s.terminal.coefficient(k) : b[t + 1];
        u[k] = coef * tr.returns[th][k];
      }
      const double m = per.ce.evaluate(u, tr.probs);
      if (m > best) {
        best = m;
        theta[t] = th;
      }
    }
    g[t] = best;
    const HomotheticStep st = homothetic_step(per.aggregator, best);
    b[t] = st.b;
    share[t] = st.share;
  }
  return make_homothetic_solution(std::make_shared<const Setting>(s), std::move(b), std::move(g), std::move(share),
                                  std::move(theta));
}

}  // namespace eislab
