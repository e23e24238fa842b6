#include "eislab/core/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "eislab/core/error.hpp"

namespace eislab {

// Newton iteration on the physicists' Hermite polynomials with the usual
// asymptotic starting values, then rescaled to the standard normal.
DiscreteDistribution standard_normal_nodes(std::size_t n) {
  if (n == 0) throw DomainError("quadrature needs at least one node");
  const int m = static_cast<int>((n + 1) / 2);
  std::vector<double> x(n), w(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const double nn = static_cast<double>(n);
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nn + 1.0) - 1.85575 * std::pow(2.0 * nn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError("Gauss-Hermite node iteration did not converge");
    const auto ui = static_cast<std::size_t>(i);
    x[ui] = z;
    x[n - 1 - ui] = -z;
    w[ui] = 2.0 / (pp * pp);
    w[n - 1 - ui] = w[ui];
  }
  DiscreteDistribution d;
  d.values.resize(n);
  d.probs.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d.values[n - 1 - i] = std::sqrt(2.0) * x[i];
    d.probs[n - 1 - i] = w[i] / std::sqrt(std::numbers::pi);
    total += d.probs[n - 1 - i];
  }
  for (double& p : d.probs) p /= total;
  if (n == 1) d.values[0] = 0.0;
  return d;
}

DiscreteDistribution lognormal_nodes(double mu, double sigma, std::size_t n, bool mean_one) {
  if (!(sigma >= 0.0)) throw DomainError("lognormal sigma must be >= 0");
  DiscreteDistribution d = standard_normal_nodes(n);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d.values[i] = std::exp(mu + sigma * d.values[i]);
    m += d.probs[i] * d.values[i];
  }
  // exact unit mean of the discretized variable, not just of the continuous one
  if (mean_one) {
    for (double& v : d.values) v /= m;
  }
  return d;
}

}  // namespace eislab
