#include "eislab/numerics/pchip.hpp"

#include <algorithm>
#include <cmath>

#include "eislab/core/error.hpp"

namespace eislab {
namespace {

// Three-point end slope, clipped to keep the end interval monotone.
double end_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (std::signbit(d) != std::signbit(m0)) {
    d = 0.0;
  } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > std::abs(3.0 * m0)) {
    d = 3.0 * m0;
  }
  return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DimensionError("monotone cubic needs >= 2 matching knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("monotone cubic knots must be strictly increasing");
  }
  std::vector<double> h(n - 1), m(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    m[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = m[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (m[i - 1] == m[i]) {
      d_[i] = m[i];
    } else if (m[i - 1] * m[i] > 0.0) {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
    }
  }
  d_[0] = end_slope(h[0], h[1], m[0], m[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

MonotoneCubic::Value MonotoneCubic::eval(double x) const {
  const double slack = 1e-12 * std::max({1.0, std::abs(x_.front()), std::abs(x_.back())});
  if (x < x_.front() - slack || x > x_.back() + slack) {
    throw DomainError("interpolation out of range: " + std::to_string(x) + " not in [" +
                      std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
  }
  x = std::clamp(x, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double y0 = y_[i], y1 = y_[i + 1];
  const double d0 = d_[i] * h, d1 = d_[i + 1] * h;
  const double t2 = t * t, t3 = t2 * t;
  Value v;
  v.y = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
  v.dy = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * d1) / h;
  v.d2y = ((12 * t - 6) * y0 + (6 * t - 4) * d0 + (-12 * t + 6) * y1 + (6 * t - 2) * d1) / (h * h);
  return v;
}

}  // namespace eislab
