#pragma once

#include "eislab/core/setting.hpp"
#include "eislab/solver/solution.hpp"

namespace eislab {

// True when V_t(w) = b_t w for all t: homogeneous aggregators and certainty
// equivalents, no income, terminal utility without intercept. `why` receives
// the first violated hypothesis.
bool homothetic_setting(const Setting& s, std::string* why = nullptr);

// b_T from the terminal utility, then backwards
//   g_t = max_theta M_t(b_{t+1} R_{t+1}(theta)),  b_t = max_x f_t(x, (1 - x) g_t),
// with the closed forms for Epstein-Zin and Cobb-Douglas aggregators.
Solution solve_homothetic(const Setting& s);

// Closed-form Epstein-Zin step: b = ((1-beta)^psi + beta^psi g^(psi-1))^(1/(psi-1)),
// consumption share (1-beta)^psi b^(1-psi); the Cobb-Douglas limit at psi = 1.
struct HomotheticStep {
  double b = 0.0;
  double share = 0.0;
};
HomotheticStep homothetic_step(const Aggregator& f, double g);

}  // namespace eislab
