#pragma once

#include <string>
#include <vector>

#include "eislab/core/aggregator.hpp"

namespace eislab {

// Two periods without risk: endowments e1, e2, a risk-free asset with gross
// return rf, second-period utility c2 and preference shifter rho on it. The
// agent maximizes f(c1, rho c2) subject to c1 + c2 / rf = e1 + e2 / rf.
struct TwoPeriodProblem {
  double e1 = 1.0;
  double e2 = 0.0;
  double rf = 1.0;
  double rho = 1.0;
  Aggregator aggregator = Aggregator::epstein_zin(0.5, 1.0);

  double lifetime_wealth() const { return e1 + e2 / rf; }
};

struct TwoPeriodSolution {
  double c1 = 0.0;
  double c2 = 0.0;
  double utility = 0.0;
  bool closed_form = false;
};

// Throws PreconditionError when e1, e2 < 0, rf <= 0, rho <= 0 or lifetime wealth <= 0.
void check_problem(const TwoPeriodProblem& p);

// Closed-form demand for Epstein-Zin and Cobb-Douglas; numeric argmax otherwise.
TwoPeriodSolution solve_two_period(const TwoPeriodProblem& p);
// Always takes the numeric route: coarse scan, golden section, then the
// first-order condition f_c = rho rf f_v. Throws ConvergenceError on a
// corner and PreconditionError if the scan finds several local maxima.
TwoPeriodSolution solve_two_period_numeric(const TwoPeriodProblem& p);

struct TwoPeriodSigns {
  double psi = 0.0;      // local EIS at the optimum
  double epsilon = 0.0;  // (e1 - c + e2 / rf) / (e1 - c)
  // Predicted signs. The rf response is sign(1 - epsilon psi) for savers; for
  // borrowers the shock lowers continuation value and the sign flips.
  int dc_drho_sign = 0;
  int dc_drf_sign = 0;
  // Implicit-function-theorem values and central-difference estimates.
  double dc_drho = 0.0;
  double dc_drf = 0.0;
  double dc_drho_fd = 0.0;
  double dc_drf_fd = 0.0;
  bool rho_agrees = true;
  bool rf_agrees = true;
};

// Throws PreconditionError when e1 - c = 0 (epsilon undefined).
TwoPeriodSigns two_period_signs(const TwoPeriodProblem& p);

struct Figure1Row {
  std::string panel;
  std::string curve;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct Figure1Bundle {
  double psi = 0.0;
  double rf = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct Figure1Data {
  std::vector<Figure1Row> rows;
  std::vector<Figure1Bundle> optima;
};

// Budget lines, optimal bundles and indifference curves through them for
// every (psi, rf) pair, with rho = 1.
Figure1Data figure1_data(double beta, const std::vector<double>& psis, const std::vector<double>& rates,
                         int resolution, double e1 = 1.0, double e2 = 0.0);

}  // namespace eislab
