#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eislab/core/aggregator.hpp"
#include "eislab/core/environment.hpp"

namespace eislab {

// Responses with |1 - eps psi| at or below this are knife-edge.
inline constexpr double kKnifeEdge = 1e-4;

// EIS of f at (c, v) from its definition: move along the indifference curve
// through (c, v) to log MRS s +/- step (Newton on the two-equation system in
// log c, log v) and central-difference log(c / v). Throws ConvergenceError
// when Newton fails and PreconditionError on a singular Jacobian.
double indifference_eis(const Aggregator& f, double c, double v, double step = 1e-4);

// Optimal consumption of max_{0 < c < w} f(c, v(w - c, alpha)); throws
// ConvergenceError at a corner.
double optimal_consumption(const Environment& env, double w, double alpha);

// EIS at the optimum: the parameter for the built-in families, the
// indifference-curve construction for custom aggregators.
double compute_eis(const Environment& env, double w, double alpha);

// (v_wa / v_w) / (v_a / v) at the optimal savings w - c. Exactly 1 for
// homothetic environments. Throws DomainError when v_a = 0.
double compute_remv(const Environment& env, double w, double alpha);

struct ResponseReport {
  double w = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double psi = 0.0;
  double eps = 0.0;  // NaN when v_alpha = 0
  // (1/c + v_w/v - psi v_ww/v_w) c_alpha = v_alpha/v - psi v_walpha/v_w
  double coefficient = 0.0;
  double rhs = 0.0;
  double c_alpha = 0.0;
  double c_alpha_fd = 0.0;
  double residual = 0.0;  // coefficient * c_alpha_fd - rhs
  int sign_pred = 0;      // 0 at knife-edge
  int sign_obs = 0;
  bool concave = true;    // v_ww <= 0
  bool smooth = true;
  bool knife_edge = false;
  bool grid_accuracy = false;
  // Sign asserted: concave, smooth and not knife-edge.
  bool asserted = false;
  bool agrees = true;
};

// Formula value and a re-solve oracle (central differences with relative
// step 1e-5 in alpha, one-sided at the ends of the admissible range).
ResponseReport consumption_response(const Environment& env, double w, double alpha);
// Formula value of c_alpha only.
double response_formula(const Environment& env, double w, double alpha);

struct DiscreteResponse {
  double integral = 0.0;  // integral of c_alpha over the path
  double direct = 0.0;    // c(w, alpha1) - c(w, alpha0)
  bool agrees = true;     // |integral - direct| <= 1e-4
  std::size_t evaluations = 0;
};

// Adaptive Simpson with n_steps initial panels. Throws PreconditionError
// (naming alpha) when the environment is not smooth somewhere on the path.
DiscreteResponse discrete_response(const Environment& env, double w, double alpha0, double alpha1,
                                   std::size_t n_steps = 8);

struct Box {
  double lo = 0.0;
  double hi = 1.0;
};

struct CertificateOptions {
  std::size_t wealth_points = 5;
  std::size_t share_points = 41;
  std::size_t alpha_points = 11;
  // Consumption as a share of wealth over which the condition is sampled.
  Box share{0.01, 0.99};
  double margin = 0.0;
  // Brute-force cross-check: alpha ladder and consumption scan per wealth.
  std::size_t ladder = 20;
  std::size_t scan = 400;
  bool brute_force = true;
};

struct Certificate {
  enum class Verdict { Below, Above, Mixed };
  Verdict verdict = Verdict::Mixed;
  double min_lhs = 0.0;
  double max_lhs = 0.0;
  // Distance of the sampled left-hand side from 1 on the certified side.
  double margin = 0.0;
  // (1/w) f_v / f_cv over the same samples, for homothetic environments.
  bool homothetic = false;
  double min_simplified = 0.0;
  double max_simplified = 0.0;
  std::size_t samples = 0;
  // Brute force: argmax pairs out of order, and argmaxes outside the share box.
  std::size_t violations = 0;
  std::size_t outside_box = 0;
  std::size_t comparisons = 0;

  std::string verdict_name() const;
};

// Samples the monotonicity condition on w-box x share-box x alpha-box and
// classifies it; throws PreconditionError where f_cv <= 0.
Certificate monotone_condition(const Environment& env, Box w_box, Box alpha_box, const CertificateOptions& opt = {});

// Left-hand side of the condition at (w, c, alpha).
double monotone_lhs(const Environment& env, double w, double c, double alpha);

}  // namespace eislab
