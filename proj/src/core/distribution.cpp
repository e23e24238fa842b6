#include "eislab/core/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "eislab/core/error.hpp"

namespace eislab {
namespace {

double cdf(std::span<const double> values, std::span<const double> probs, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= x) s += probs[i];
  }
  return s;
}

double lower_partial(std::span<const double> values, std::span<const double> probs, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * std::max(x - values[i], 0.0);
  return s;
}

std::vector<double> support(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pts(a.begin(), a.end());
  pts.insert(pts.end(), b.begin(), b.end());
  std::sort(pts.begin(), pts.end());
  return pts;
}

void check_sizes(std::span<const double> v, std::span<const double> p) {
  if (v.size() != p.size()) throw DimensionError("distribution values and probabilities differ in size");
}

}  // namespace

std::string probability_problem(std::span<const double> probs, double tol) {
  if (probs.empty()) return "empty probability vector";
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
      return "probability " + std::to_string(i) + " outside [0, 1]";
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > tol) return "probabilities sum to " + std::to_string(total);
  return {};
}

double mean(std::span<const double> values, std::span<const double> probs) {
  check_sizes(values, probs);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * values[i];
  return s;
}

bool fosd_dominates(std::span<const double> a_values, std::span<const double> a_probs,
                    std::span<const double> b_values, std::span<const double> b_probs, double tol) {
  check_sizes(a_values, a_probs);
  check_sizes(b_values, b_probs);
  for (double x : support(a_values, b_values)) {
    if (cdf(a_values, a_probs, x) > cdf(b_values, b_probs, x) + tol) return false;
  }
  return true;
}

bool sosd_dominates(std::span<const double> a_values, std::span<const double> a_probs,
                    std::span<const double> b_values, std::span<const double> b_probs, double tol) {
  check_sizes(a_values, a_probs);
  check_sizes(b_values, b_probs);
  for (double x : support(a_values, b_values)) {
    if (lower_partial(a_values, a_probs, x) > lower_partial(b_values, b_probs, x) + tol) return false;
  }
  return true;
}

}  // namespace eislab
