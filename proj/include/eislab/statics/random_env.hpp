#pragma once

#include <random>
#include <string>

#include "eislab/core/environment.hpp"

namespace eislab {

struct RandomEnvironmentOptions {
  double homothetic_probability = 0.5;
  double psi_lo = 0.2;
  double psi_hi = 5.0;
};

// Strongly regular test environment with an Epstein-Zin aggregator and
//   v(s, a) = g(a) s                       (homothetic), or
//   v(s, a) = g(a) s^kappa + m(a)          kappa in [0.3, 1), m >= 0,
// where g = g0 e^{k a} and m = m0 e^{j a} are increasing, so v_ww <= 0 and
// v is increasing in a. The draw is rejected until the optimum at (w, alpha)
// has a consumption share in [1e-3, 1 - 1e-3].
struct RandomEnvironment {
  Environment env{Aggregator::cobb_douglas(0.5), {}, {}, {}, 0.0, 1.0, false};
  double w = 1.0;
  double alpha = 0.5;
  bool homothetic = true;
  double beta = 0.5;
  double psi = 1.0;
  double kappa = 1.0;
  std::string description;
};

RandomEnvironment random_environment(std::mt19937_64& rng, const RandomEnvironmentOptions& opt = {});

}  // namespace eislab
