#pragma once

#include <cstddef>
#include <vector>

namespace eislab {

struct DiscreteDistribution {
  std::vector<double> values;
  std::vector<double> probs;
};

// n-point Gauss-Hermite rule for a standard normal variable.
DiscreteDistribution standard_normal_nodes(std::size_t n);

// exp(N(mu, sigma^2)) discretized with Gauss-Hermite nodes. With
// mean_one = true, the nodes are rescaled so the discrete mean is exactly 1.
DiscreteDistribution lognormal_nodes(double mu, double sigma, std::size_t n, bool mean_one = false);

}  // namespace eislab
