#include "eislab/numerics/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "eislab/core/error.hpp"

namespace eislab {

double golden_section_max(const std::function<double(double)>& h, double a, double b, double x_tol) {
  constexpr double r = 0.6180339887498949;
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = h(x1);
  double f2 = h(x2);
  for (int it = 0; it < 400 && (b - a) > x_tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = h(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = h(x1);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

double bracketed_root(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (std::signbit(ga) == std::signbit(gb)) throw ConvergenceError("root is not bracketed");
  std::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, max_iter);
  if (max_iter >= 200) throw ConvergenceError("TOMS 748 did not converge");
  return 0.5 * (lo + hi);
}

double bisect_increasing(const std::function<double(double)>& g, double a, double b, int iterations) {
  for (int i = 0; i < iterations; ++i) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (g(m) < 0.0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

ScalarMaximum maximize_scalar(const std::function<double(double)>& h,
                              const std::function<double(double)>& dh, double lo, double hi,
                              const MaximizeOptions& opt) {
  if (!(hi > lo)) throw DomainError("maximize_scalar: empty interval");
  const int n = std::max(opt.scan_points, 3);
  std::vector<double> xs(static_cast<std::size_t>(n)), hs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    xs[k] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    hs[k] = h(xs[k]);
  }
  const auto best = static_cast<std::size_t>(std::distance(hs.begin(), std::max_element(hs.begin(), hs.end())));

  ScalarMaximum out;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const bool left = i == 0 || hs[i] > hs[i - 1];
    const bool right = i + 1 == hs.size() || hs[i] > hs[i + 1];
    if (left && right) ++out.local_maxima;
  }

  const std::size_t last = hs.size() - 1;
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best == last ? last : best + 1];
  const double tol = opt.x_tol * (hi - lo);
  double x = golden_section_max(h, a, b, tol);
  if (dh) {
    // polish on the first-order condition when it changes sign around x
    const double da = dh(a);
    const double db = dh(b);
    if (da > 0.0 && db < 0.0) {
      const double xr = bracketed_root(dh, a, b);
      const double hx0 = h(x);
      // The golden-section value only locates x to sqrt(eps); h itself may carry
      // rounding noise well above eps, so accept the root unless it is clearly worse.
      if (h(xr) >= hx0 - 1e-10 * std::abs(hx0)) x = xr;
    }
  }
  double hx = h(x);
  if (hs[0] > hx) {
    x = lo;
    hx = hs[0];
  }
  if (hs[last] > hx) {
    x = hi;
    hx = hs[last];
  }
  out.x = x;
  out.value = hx;
  out.at_lower = x <= lo + tol;
  out.at_upper = x >= hi - tol;
  return out;
}

}  // namespace eislab
