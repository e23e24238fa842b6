#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eislab/core/setting.hpp"

namespace eislab {

// The fifteen shocks that lower continuation values. Magnitude conventions:
//   ConcavifyRisk, ConcavifyAmbiguity    curvature raised by m >= 0
//   ShrinkPortfolios, ShrinkHedging      fraction m in (0, 1] of the removable portfolios dropped
//                                        (or the explicit `keep` list)
//   FosdReturns, FosdIncome,
//   FosdProductivity                     outcomes multiplied by m in (0, 1]
//   FosdWageUp                           wages multiplied by m >= 1
//   FosdDepreciationUp, TaxUp            rate raised by m >= 0 (additive)
//   SosdReturns, SosdIncome,
//   SosdDepreciation                     every state split into two equally likely states at +/- m,
//                                        spread truncated to keep outcomes admissible
//   DevalueConsumption                   f(c, v) -> f(c / (1 + m), v)
//   EnlargePriors                        adds (1-m) pi + m delta_worst (or `extra_prior`)
enum class ShockKind {
  ConcavifyRisk = 1,
  ShrinkPortfolios,
  FosdReturns,
  SosdReturns,
  DevalueConsumption,
  ConcavifyAmbiguity,
  EnlargePriors,
  FosdIncome,
  ShrinkHedging,
  SosdIncome,
  FosdProductivity,
  FosdWageUp,
  FosdDepreciationUp,
  SosdDepreciation,
  TaxUp
};

enum class IncomeComponent { Transitory, Permanent };

struct Shock {
  ShockKind kind = ShockKind::FosdReturns;
  double magnitude = 1.0;
  // Only this period (DevalueConsumption: this and all later periods).
  // Default: every period, and periods >= 1 for DevalueConsumption so that
  // the first period's aggregator is untouched.
  std::optional<std::size_t> period;
  IncomeComponent component = IncomeComponent::Transitory;
  std::vector<std::size_t> keep;
  std::vector<double> extra_prior;
};

int shock_number(ShockKind k);
std::string shock_name(ShockKind k);
// Accepts "cs1".."cs15" or the names returned by shock_name; throws DomainError otherwise.
ShockKind parse_shock_kind(const std::string& s);
// Magnitude that leaves the setting unchanged, where one exists.
std::optional<double> identity_magnitude(ShockKind k);
// Second-order (riskiness) shocks, whose effect is only signed for concave value functions.
bool needs_concavity(ShockKind k);

// Returns the shocked setting; verifies the dominance ordering (FOSD/SOSD)
// or strict set inclusion it promises. Throws PreconditionError when the
// shock does not fit the setting's blocks.
Setting apply_shock(const Setting& s, const Shock& sh);

}  // namespace eislab
