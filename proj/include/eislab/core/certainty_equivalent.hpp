#pragma once

#include <span>
#include <vector>

namespace eislab {

// Curvature function phi of a quasi-arithmetic mean. Only the mean
// phi^{-1}(E[phi(U)]) is ever used, so phi is fixed up to an affine map:
//   CRRA(gamma): phi(x) = x^(1-gamma), log x at gamma = 1
//   CARA(a):     phi(x) = -exp(-a x), linear at a = 0
class Curvature {
 public:
  enum class Kind { Crra, Cara };

  static Curvature crra(double gamma);
  static Curvature cara(double a);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool is_log() const;
  // phi(0) is finite.
  bool defined_at_zero() const;
  // Mean is positively homogeneous of degree one (CRRA family).
  bool homogeneous() const { return kind_ == Kind::Crra; }

  // Curvature g o phi for an increasing concave g: raises gamma (or a) by delta.
  Curvature more_concave(double delta) const;

  double phi(double x) const;
  double phi_inverse(double y) const;

  // phi^{-1}(sum_i w_i phi(x_i)); terms with zero weight are skipped.
  double mean(std::span<const double> values, std::span<const double> weights) const;

  bool operator==(const Curvature&) const = default;

 private:
  Curvature(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

// Certainty equivalent M mapping a finite-support distribution of
// continuation utilities to a scalar.
class CertaintyEquivalent {
 public:
  enum class Kind { QuasiArithmetic, SmoothAmbiguity, MultiPrior };

  static CertaintyEquivalent quasi_arithmetic(Curvature risk);
  // varphi^{-1}(E_mu[varphi(phi^{-1}(E_pi[phi(U)]))])
  static CertaintyEquivalent smooth_ambiguity(Curvature risk, Curvature ambiguity,
                                              std::vector<double> mu,
                                              std::vector<std::vector<double>> priors);
  // phi^{-1}(min over priors of E_pi[phi(U)])
  static CertaintyEquivalent multi_prior(Curvature risk, std::vector<std::vector<double>> priors);

  Kind kind() const { return kind_; }
  const Curvature& risk() const { return risk_; }
  const Curvature& ambiguity() const { return ambiguity_; }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<std::vector<double>>& priors() const { return priors_; }

  // Number of states the priors are defined on (0 for quasi-arithmetic).
  std::size_t state_dimension() const;
  // M(bU) = b M(U) for b > 0.
  bool homogeneous_degree_one() const;
  // Multi-prior minimum is only piecewise smooth.
  bool smooth() const { return kind_ != Kind::MultiPrior; }

  // `probs` is the reference measure; ambiguity kinds use their priors and only
  // check its dimension.
  double evaluate(std::span<const double> values, std::span<const double> probs) const;

  CertaintyEquivalent with_risk(Curvature risk) const;
  CertaintyEquivalent with_ambiguity(Curvature ambiguity) const;
  CertaintyEquivalent with_priors(std::vector<std::vector<double>> priors) const;
  // Splits state k into two states, each carrying half of every prior's mass on k.
  CertaintyEquivalent split_state(std::size_t k) const;
  // Drops the listed states (must carry zero prior mass).
  CertaintyEquivalent drop_states(const std::vector<std::size_t>& sorted_states) const;

 private:
  CertaintyEquivalent(Kind kind, Curvature risk, Curvature ambiguity, std::vector<double> mu,
                      std::vector<std::vector<double>> priors);

  Kind kind_;
  Curvature risk_;
  Curvature ambiguity_;
  std::vector<double> mu_;
  std::vector<std::vector<double>> priors_;
};

}  // namespace eislab
