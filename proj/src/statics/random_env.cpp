#include "eislab/statics/random_env.hpp"

#include <cmath>
#include <sstream>

#include "eislab/core/error.hpp"
#include "eislab/statics/statics.hpp"

namespace eislab {

namespace {
constexpr double kMinShare = 1e-3;
}  // namespace

RandomEnvironment random_environment(std::mt19937_64& rng, const RandomEnvironmentOptions& opt) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto between = [&](double a, double b) { return a + (b - a) * u(rng); };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RandomEnvironment r;
    r.beta = between(0.3, 0.95);
    r.psi = std::exp(between(std::log(opt.psi_lo), std::log(opt.psi_hi)));
    r.w = between(0.5, 5.0);
    r.alpha = between(0.05, 0.95);
    r.homothetic = u(rng) < opt.homothetic_probability;
    const double g0 = between(0.5, 2.0);
    const double k = between(0.1, 1.0);
    const Aggregator f = Aggregator::epstein_zin(r.beta, r.psi);
    std::ostringstream os;
    os.precision(17);
    os << "beta=" << r.beta << " psi=" << r.psi << " w=" << r.w << " alpha=" << r.alpha << " g0=" << g0 << " k=" << k;
    if (r.homothetic) {
      r.env = homothetic_environment(f, [g0, k](double a) {
        const double g = g0 * std::exp(k * a);
        return std::make_pair(g, k * g);
      });
    } else {
      r.kappa = between(0.3, 1.0);
      const double m0 = u(rng) < 0.25 ? 0.0 : between(0.0, 1.0);
      const double j = between(0.0, 3.0 * k);
      const double kappa = r.kappa;
      os << " kappa=" << kappa << " m0=" << m0 << " j=" << j;
      r.env.aggregator = f;
      r.env.continuation = [=](double s, double a) {
        const double G = g0 * std::exp(k * a);
        const double M = m0 * std::exp(j * a);
        const double sk = std::pow(s, kappa);
        ContinuationPoint p;
        p.v = G * sk + M;
        p.v_w = kappa * G * sk / s;
        p.v_ww = kappa * (kappa - 1.0) * G * sk / (s * s);
        p.v_alpha = k * G * sk + j * M;
        p.v_walpha = k * p.v_w;
        return p;
      };
    }
    r.description = os.str();
    // Keep optima well inside (0, w): near-corner draws make 1/c and
    // 1/(w - c) so large that no finite-difference oracle can resolve them.
    try {
      const double share = optimal_consumption(r.env, r.w, r.alpha) / r.w;
      if (share < kMinShare || share > 1.0 - kMinShare) continue;
    } catch (const ConvergenceError&) {
      continue;
    }
    return r;
  }
  throw ConvergenceError("could not draw an environment with an interior optimum");
}

}  // namespace eislab
