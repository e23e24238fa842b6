#pragma once

#include <functional>

namespace eislab {

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
  // Separate peaks seen on the coarse scan.
  int local_maxima = 0;
  bool at_lower = false;
  bool at_upper = false;
};

struct MaximizeOptions {
  int scan_points = 48;
  double x_tol = 1e-13;  // relative to the interval width
};

// Maximizes h on [lo, hi]: coarse scan, golden-section refinement of the best
// bracket, then (when `dh` is given) a bracketed root of dh for full precision.
// Endpoint optima are reported as corners.
ScalarMaximum maximize_scalar(const std::function<double(double)>& h,
                              const std::function<double(double)>& dh, double lo, double hi,
                              const MaximizeOptions& opt = {});

// Golden-section search for a maximum of a unimodal h on [a, b].
double golden_section_max(const std::function<double(double)>& h, double a, double b, double x_tol);

// Root of g on [a, b] with g(a), g(b) of opposite sign (TOMS 748).
double bracketed_root(const std::function<double(double)>& g, double a, double b);

// Root of an increasing g by bisection on [a, b]; g(a) <= 0 <= g(b).
double bisect_increasing(const std::function<double(double)>& g, double a, double b, int iterations = 200);

}  // namespace eislab
