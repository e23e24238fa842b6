#pragma once

#include <memory>
#include <string>

namespace eislab {

// Value of f(c, v) together with all partials up to second order.
struct AggregatorPoint {
  double f = 0.0;
  double fc = 0.0;
  double fv = 0.0;
  double fcc = 0.0;
  double fcv = 0.0;
  double fvv = 0.0;
};

// User-supplied aggregator. Partials must be analytic; the library never
// differentiates a model numerically except inside test oracles.
class AggregatorModel {
 public:
  virtual ~AggregatorModel() = default;
  virtual AggregatorPoint evaluate(double c, double v) const = 0;
  virtual double value(double c, double v) const { return evaluate(c, v).f; }
  virtual bool homogeneous_degree_one() const = 0;
  // True when optimal consumption is interior for any positive continuation
  // value function with v(0) = 0.
  virtual bool inada() const = 0;
  virtual std::string describe() const { return "custom"; }
};

enum class AggregatorFamily { EpsteinZin, CobbDouglas, Custom };

// Intertemporal aggregator f(c, v). Cheap to copy; immutable.
class Aggregator {
 public:
  // CES / Epstein-Zin with discount beta and EIS psi. |psi - 1| < 1e-10
  // selects the Cobb-Douglas limit.
  static Aggregator epstein_zin(double beta, double psi);
  static Aggregator cobb_douglas(double beta);
  static Aggregator custom(std::shared_ptr<const AggregatorModel> model);

  AggregatorFamily family() const { return family_; }
  double beta() const;
  // EIS parameter for the built-in families (1 for Cobb-Douglas).
  double psi() const;

  double value(double c, double v) const { return model_->value(c, v); }
  AggregatorPoint evaluate(double c, double v) const { return model_->evaluate(c, v); }
  bool homogeneous_degree_one() const { return model_->homogeneous_degree_one(); }
  bool inada() const { return model_->inada(); }
  std::string describe() const { return model_->describe(); }
  const std::shared_ptr<const AggregatorModel>& model() const { return model_; }

  // f~(c, v) = f(c / kappa, v) with kappa >= 1: future consumption expenditure
  // becomes less valuable.
  Aggregator devalued(double kappa) const;

 private:
  Aggregator(AggregatorFamily family, double beta, double psi,
             std::shared_ptr<const AggregatorModel> model);

  AggregatorFamily family_;
  double beta_;
  double psi_;
  std::shared_ptr<const AggregatorModel> model_;
};

// Elasticity of substitution between c and v along the indifference curve
// through (c, v), from second-order partials:
//   -f_c f_v (c f_c + v f_v) / (c v (f_cc f_v^2 - 2 f_cv f_c f_v + f_vv f_c^2)).
double local_eis(const AggregatorPoint& p, double c, double v);

// Sampled check that f is strictly increasing in both arguments on a box of
// the positive orthant; for homogeneous models also checks f(lc, lv) = l f and
// the Euler identity f = c f_c + v f_v to relative `tol`.
struct AggregatorCheck {
  bool increasing = true;
  bool homogeneity = true;
  bool euler = true;
  double worst_euler_residual = 0.0;
};
AggregatorCheck check_aggregator(const Aggregator& agg, double tol = 1e-8);

}  // namespace eislab
