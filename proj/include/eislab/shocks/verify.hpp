#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eislab/core/setting.hpp"
#include "eislab/shocks/shock.hpp"
#include "eislab/solver/backward.hpp"
#include "eislab/solver/solution.hpp"

namespace eislab {

struct DropReport {
  bool passed = true;
  std::size_t nodes = 0;
  std::size_t violations = 0;
  // Largest v_shocked - v_baseline over all nodes and periods.
  double worst_excess = 0.0;
  std::size_t worst_period = 0;
  double worst_savings = 0.0;
  bool concavity_required = false;
  bool concave = true;
  // Set when the concavity hypothesis failed and violations became warnings.
  bool downgraded = false;
  std::vector<std::string> warnings;
};

// True when every tabulated V_t of the solution is concave in wealth
// (non-increasing secant slopes up to relative 1e-9).
bool value_functions_concave(const Solution& sol);

// Node-by-node comparison of two solutions on the same grid plan:
// v_shocked <= v_baseline + tol (1 + |v_baseline|) at every node and period.
DropReport compare_continuations(const Solution& baseline, const Solution& shocked, bool requires_concavity,
                                 double tol = 1e-9);

// Solves both settings on one joint grid plan and compares them.
DropReport verify_continuation_drop(const Setting& baseline, const Setting& shocked, const WealthGrid& grid,
                                    bool requires_concavity = false, const SolveOptions& opt = {});

struct RemvCheck {
  double savings = 0.0;
  double permanent = 0.0;
  double eps_direct = 0.0;   // (v_wa / v_w) / (v_a / v)
  double eps_formula = 0.0;  // (1 + (p/s) v_p / v_w) / (1 + (p/s) v_pa / v_wa)
  bool agrees = true;        // |difference| <= 1e-5
  // (p / s, eps_formula) at shrinking p / s while (s, p) stays on the grid:
  // the approach to 1 as income becomes negligible.
  std::vector<std::pair<double, double>> limit;
};

// REMV of the path from `shocked` (alpha = 0) to `baseline` (alpha = 1) at
// savings s and permanent income p in period t. At p = 0 income vanishes, the
// environment is homothetic and both values are 1.
RemvCheck income_remv_check(const Solution& baseline, const Solution& shocked, std::size_t t, double s, double p,
                            double alpha = 0.5);
// Convenience: applies the shock, solves both settings on a joint reduced
// plan and checks at (s, p). Requires the income-reduction hypotheses.
RemvCheck income_remv_check(const Setting& s, const Shock& sh, double savings, double p, const WealthGrid& grid,
                            std::size_t t = 0);

}  // namespace eislab
