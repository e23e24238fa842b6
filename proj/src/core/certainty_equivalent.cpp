#include "eislab/core/certainty_equivalent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eislab/core/distribution.hpp"
#include "eislab/core/error.hpp"

namespace eislab {
namespace {

constexpr double kLogThreshold = 1e-10;

void check_values(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw DimensionError("certainty equivalent: " + std::to_string(values.size()) +
                         " values against " + std::to_string(weights.size()) + " probabilities");
  }
  if (values.empty()) throw DimensionError("certainty equivalent of an empty distribution");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("utility values must be finite and nonnegative");
  }
}

void check_distribution(std::span<const double> probs, const char* what) {
  const std::string problem = probability_problem(probs, 1e-10);
  if (!problem.empty()) throw DomainError(std::string(what) + ": " + problem);
}

}  // namespace

Curvature Curvature::crra(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("CRRA gamma must be >= 0");
  return Curvature(Kind::Crra, gamma);
}

Curvature Curvature::cara(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("CARA coefficient must be >= 0");
  return Curvature(Kind::Cara, a);
}

bool Curvature::is_log() const {
  return kind_ == Kind::Crra && std::abs(param_ - 1.0) < kLogThreshold;
}

bool Curvature::defined_at_zero() const {
  return kind_ == Kind::Cara || (param_ < 1.0 && !is_log());
}

Curvature Curvature::more_concave(double delta) const {
  if (!(delta >= 0.0)) throw DomainError("concavification step must be >= 0");
  return Curvature(kind_, param_ + delta);
}

double Curvature::phi(double x) const {
  if (kind_ == Kind::Cara) return param_ == 0.0 ? x : -std::exp(-param_ * x);
  if (is_log()) return std::log(x);
  return std::pow(x, 1.0 - param_);
}

double Curvature::phi_inverse(double y) const {
  if (kind_ == Kind::Cara) return param_ == 0.0 ? y : -std::log(-y) / param_;
  if (is_log()) return std::exp(y);
  return std::pow(y, 1.0 / (1.0 - param_));
}

double Curvature::mean(std::span<const double> values, std::span<const double> weights) const {
  check_values(values, weights);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] == 0.0) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
    total += weights[i];
  }
  if (!(total > 0.0)) throw DomainError("certainty equivalent with zero total probability");
  if (lo == hi) return lo;

  double out = 0.0;
  if (kind_ == Kind::Cara) {
    if (param_ == 0.0) {
      for (std::size_t i = 0; i < values.size(); ++i) out += weights[i] * values[i];
      out /= total;
    } else {
      // shift by the minimum so every exponent is <= 0
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] != 0.0) s += weights[i] * std::exp(-param_ * (values[i] - lo));
      }
      out = lo - std::log(s / total) / param_;
    }
  } else {
    if (!defined_at_zero() && lo == 0.0) {
      throw DomainError("CRRA curvature with gamma >= 1 is undefined at a zero utility value");
    }
    if (is_log()) {
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] != 0.0) s += weights[i] * std::log(values[i] / hi);
      }
      out = hi * std::exp(s / total);
    } else {
      // power mean scaled by the maximum to avoid overflow for large |1 - gamma|
      const double e = 1.0 - param_;
      double s = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] != 0.0) s += weights[i] * std::pow(values[i] / hi, e);
      }
      out = hi * std::pow(s / total, 1.0 / e);
    }
  }
  return std::clamp(out, lo, hi);
}

CertaintyEquivalent::CertaintyEquivalent(Kind kind, Curvature risk, Curvature ambiguity,
                                         std::vector<double> mu,
                                         std::vector<std::vector<double>> priors)
    : kind_(kind),
      risk_(risk),
      ambiguity_(ambiguity),
      mu_(std::move(mu)),
      priors_(std::move(priors)) {}

CertaintyEquivalent CertaintyEquivalent::quasi_arithmetic(Curvature risk) {
  return CertaintyEquivalent(Kind::QuasiArithmetic, risk, risk, {}, {});
}

CertaintyEquivalent CertaintyEquivalent::smooth_ambiguity(Curvature risk, Curvature ambiguity,
                                                          std::vector<double> mu,
                                                          std::vector<std::vector<double>> priors) {
  if (priors.empty()) throw DimensionError("smooth ambiguity needs at least one prior");
  if (mu.size() != priors.size()) throw DimensionError("smooth ambiguity: mu and priors differ in size");
  check_distribution(mu, "second-order prior mu");
  for (const auto& p : priors) {
    if (p.size() != priors.front().size()) throw DimensionError("priors differ in state dimension");
    check_distribution(p, "prior");
  }
  return CertaintyEquivalent(Kind::SmoothAmbiguity, risk, ambiguity, std::move(mu), std::move(priors));
}

CertaintyEquivalent CertaintyEquivalent::multi_prior(Curvature risk,
                                                     std::vector<std::vector<double>> priors) {
  if (priors.empty()) throw DimensionError("multi-prior certainty equivalent needs a prior");
  for (const auto& p : priors) {
    if (p.size() != priors.front().size()) throw DimensionError("priors differ in state dimension");
    check_distribution(p, "prior");
  }
  return CertaintyEquivalent(Kind::MultiPrior, risk, risk, {}, std::move(priors));
}

std::size_t CertaintyEquivalent::state_dimension() const {
  return priors_.empty() ? 0 : priors_.front().size();
}

bool CertaintyEquivalent::homogeneous_degree_one() const {
  if (kind_ == Kind::SmoothAmbiguity) return risk_.homogeneous() && ambiguity_.homogeneous();
  return risk_.homogeneous();
}

double CertaintyEquivalent::evaluate(std::span<const double> values,
                                     std::span<const double> probs) const {
  if (values.size() != probs.size()) {
    throw DimensionError("certainty equivalent: values and probabilities differ in size");
  }
  if (kind_ != Kind::QuasiArithmetic && state_dimension() != values.size()) {
    throw DimensionError("certainty equivalent: priors are defined on " +
                         std::to_string(state_dimension()) + " states, got " +
                         std::to_string(values.size()));
  }
  switch (kind_) {
    case Kind::QuasiArithmetic:
      return risk_.mean(values, probs);
    case Kind::SmoothAmbiguity: {
      std::vector<double> inner(priors_.size());
      for (std::size_t k = 0; k < priors_.size(); ++k) inner[k] = risk_.mean(values, priors_[k]);
      return ambiguity_.mean(inner, mu_);
    }
    case Kind::MultiPrior: {
      // phi^{-1} is increasing, so the minimum commutes with it.
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : priors_) best = std::min(best, risk_.mean(values, p));
      return best;
    }
  }
  return 0.0;
}

CertaintyEquivalent CertaintyEquivalent::with_risk(Curvature risk) const {
  CertaintyEquivalent out = *this;
  out.risk_ = risk;
  if (kind_ == Kind::QuasiArithmetic) out.ambiguity_ = risk;
  return out;
}

CertaintyEquivalent CertaintyEquivalent::with_ambiguity(Curvature ambiguity) const {
  if (kind_ != Kind::SmoothAmbiguity) {
    throw PreconditionError("ambiguity curvature is only defined for smooth ambiguity");
  }
  CertaintyEquivalent out = *this;
  out.ambiguity_ = ambiguity;
  return out;
}

CertaintyEquivalent CertaintyEquivalent::with_priors(std::vector<std::vector<double>> priors) const {
  switch (kind_) {
    case Kind::MultiPrior:
      return multi_prior(risk_, std::move(priors));
    case Kind::SmoothAmbiguity: {
      if (priors.size() != mu_.size()) throw DimensionError("replacement priors must match mu");
      return smooth_ambiguity(risk_, ambiguity_, mu_, std::move(priors));
    }
    case Kind::QuasiArithmetic:
      break;
  }
  throw PreconditionError("quasi-arithmetic certainty equivalent carries no priors");
}

CertaintyEquivalent CertaintyEquivalent::split_state(std::size_t k) const {
  if (kind_ == Kind::QuasiArithmetic) return *this;
  if (k >= state_dimension()) throw DimensionError("split_state: state index out of range");
  CertaintyEquivalent out = *this;
  for (auto& p : out.priors_) {
    const double half = 0.5 * p[k];
    p[k] = half;
    p.insert(p.begin() + static_cast<std::ptrdiff_t>(k) + 1, half);
  }
  return out;
}

CertaintyEquivalent CertaintyEquivalent::drop_states(const std::vector<std::size_t>& sorted_states) const {
  if (kind_ == Kind::QuasiArithmetic) return *this;
  CertaintyEquivalent out = *this;
  for (auto& p : out.priors_) {
    for (auto it = sorted_states.rbegin(); it != sorted_states.rend(); ++it) {
      if (p.at(*it) != 0.0) throw PreconditionError("cannot drop a state that carries prior mass");
      p.erase(p.begin() + static_cast<std::ptrdiff_t>(*it));
    }
  }
  return out;
}

}  // namespace eislab
