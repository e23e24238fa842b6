#include "eislab/core/aggregator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "eislab/core/error.hpp"

namespace eislab {
namespace {

constexpr double kUnitEisThreshold = 1e-10;

// Partials shared by the CES family: with f > 0,
//   f_c = (1 - beta) (f / c)^(1/psi),  f_v = beta (f / v)^(1/psi),
// and the second derivatives follow from differentiating those.
AggregatorPoint ces_partials(double f, double c, double v, double beta, double psi) {
  AggregatorPoint p;
  p.f = f;
  const double inv_psi = 1.0 / psi;
  p.fc = (1.0 - beta) * std::pow(f / c, inv_psi);
  p.fv = beta * std::pow(f / v, inv_psi);
  p.fcc = p.fc * inv_psi * (p.fc / f - 1.0 / c);
  p.fcv = p.fc * inv_psi * (p.fv / f);
  p.fvv = p.fv * inv_psi * (p.fv / f - 1.0 / v);
  return p;
}

class EpsteinZinModel final : public AggregatorModel {
 public:
  EpsteinZinModel(double beta, double psi) : beta_(beta), psi_(psi), rho_(1.0 - 1.0 / psi) {}

  double value(double c, double v) const override {
    if (c < 0.0 || v < 0.0) throw DomainError("Epstein-Zin aggregator evaluated at negative argument");
    if (rho_ < 0.0 && (c == 0.0 || v == 0.0)) return 0.0;
    const double a = (1.0 - beta_) * std::pow(c, rho_) + beta_ * std::pow(v, rho_);
    return std::pow(a, 1.0 / rho_);
  }

  AggregatorPoint evaluate(double c, double v) const override {
    if (c <= 0.0 || v <= 0.0) {
      throw DomainError("Epstein-Zin partials require c > 0 and v > 0");
    }
    return ces_partials(value(c, v), c, v, beta_, psi_);
  }

  bool homogeneous_degree_one() const override { return true; }
  bool inada() const override { return true; }
  std::string describe() const override {
    std::ostringstream os;
    os << "epstein_zin(beta=" << beta_ << ", psi=" << psi_ << ")";
    return os.str();
  }

 private:
  double beta_;
  double psi_;
  double rho_;
};

class CobbDouglasModel final : public AggregatorModel {
 public:
  explicit CobbDouglasModel(double beta) : beta_(beta) {}

  double value(double c, double v) const override {
    if (c < 0.0 || v < 0.0) throw DomainError("Cobb-Douglas aggregator evaluated at negative argument");
    if (c == 0.0 || v == 0.0) return 0.0;
    return std::exp((1.0 - beta_) * std::log(c) + beta_ * std::log(v));
  }

  AggregatorPoint evaluate(double c, double v) const override {
    if (c <= 0.0 || v <= 0.0) {
      throw DomainError("Cobb-Douglas partials require c > 0 and v > 0");
    }
    return ces_partials(value(c, v), c, v, beta_, 1.0);
  }

  bool homogeneous_degree_one() const override { return true; }
  bool inada() const override { return true; }
  std::string describe() const override {
    std::ostringstream os;
    os << "cobb_douglas(beta=" << beta_ << ")";
    return os.str();
  }

 private:
  double beta_;
};

class DevaluedModel final : public AggregatorModel {
 public:
  DevaluedModel(std::shared_ptr<const AggregatorModel> inner, double kappa)
      : inner_(std::move(inner)), kappa_(kappa) {}

  double value(double c, double v) const override { return inner_->value(c / kappa_, v); }

  AggregatorPoint evaluate(double c, double v) const override {
    AggregatorPoint p = inner_->evaluate(c / kappa_, v);
    p.fc /= kappa_;
    p.fcc /= kappa_ * kappa_;
    p.fcv /= kappa_;
    return p;
  }

  bool homogeneous_degree_one() const override { return inner_->homogeneous_degree_one(); }
  bool inada() const override { return inner_->inada(); }
  std::string describe() const override {
    std::ostringstream os;
    os << "devalued(" << inner_->describe() << ", kappa=" << kappa_ << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const AggregatorModel> inner_;
  double kappa_;
};

}  // namespace

Aggregator::Aggregator(AggregatorFamily family, double beta, double psi,
                       std::shared_ptr<const AggregatorModel> model)
    : family_(family), beta_(beta), psi_(psi), model_(std::move(model)) {}

Aggregator Aggregator::epstein_zin(double beta, double psi) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("Epstein-Zin beta must lie in (0, 1)");
  if (!(psi > 0.0) || !std::isfinite(psi)) throw DomainError("Epstein-Zin psi must be positive");
  if (std::abs(psi - 1.0) < kUnitEisThreshold) return cobb_douglas(beta);
  return Aggregator(AggregatorFamily::EpsteinZin, beta, psi,
                    std::make_shared<EpsteinZinModel>(beta, psi));
}

Aggregator Aggregator::cobb_douglas(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("Cobb-Douglas beta must lie in (0, 1)");
  return Aggregator(AggregatorFamily::CobbDouglas, beta, 1.0,
                    std::make_shared<CobbDouglasModel>(beta));
}

Aggregator Aggregator::custom(std::shared_ptr<const AggregatorModel> model) {
  if (!model) throw PreconditionError("custom aggregator handle is null");
  return Aggregator(AggregatorFamily::Custom, 0.0, 0.0, std::move(model));
}

double Aggregator::beta() const {
  if (family_ == AggregatorFamily::Custom) throw PreconditionError("custom aggregator has no beta");
  return beta_;
}

double Aggregator::psi() const {
  if (family_ == AggregatorFamily::Custom) throw PreconditionError("custom aggregator has no psi parameter");
  return psi_;
}

Aggregator Aggregator::devalued(double kappa) const {
  if (!(kappa >= 1.0)) throw DomainError("devaluation factor must be >= 1");
  if (kappa == 1.0) return *this;
  return custom(std::make_shared<DevaluedModel>(model_, kappa));
}

double local_eis(const AggregatorPoint& p, double c, double v) {
  const double denom = p.fcc * p.fv * p.fv - 2.0 * p.fcv * p.fc * p.fv + p.fvv * p.fc * p.fc;
  if (denom == 0.0) throw DomainError("indifference curve has zero curvature; EIS is infinite");
  return -p.fc * p.fv * (c * p.fc + v * p.fv) / (c * v * denom);
}

AggregatorCheck check_aggregator(const Aggregator& agg, double tol) {
  constexpr std::array<double, 6> pts{0.05, 0.3, 1.0, 2.5, 7.0, 20.0};
  constexpr std::array<double, 3> scales{0.5, 2.0, 13.0};
  AggregatorCheck out;
  for (double c : pts) {
    for (double v : pts) {
      const AggregatorPoint p = agg.evaluate(c, v);
      if (!(p.fc > 0.0 && p.fv > 0.0)) out.increasing = false;
      if (!(agg.value(c * 1.01, v) > p.f && agg.value(c, v * 1.01) > p.f)) out.increasing = false;
      if (!agg.homogeneous_degree_one()) continue;
      const double euler = std::abs(p.f - c * p.fc - v * p.fv) / std::max(std::abs(p.f), 1e-300);
      out.worst_euler_residual = std::max(out.worst_euler_residual, euler);
      if (euler > tol) out.euler = false;
      for (double l : scales) {
        const double lhs = agg.value(l * c, l * v);
        if (std::abs(lhs - l * p.f) > tol * std::abs(l * p.f)) out.homogeneity = false;
      }
    }
  }
  return out;
}

}  // namespace eislab
