#pragma once

#include <cstddef>
#include <vector>

#include "eislab/core/setting.hpp"

namespace eislab {

enum class Interpolation { Linear, MonotoneCubic };

// Log-spaced wealth nodes w_min = w_1 < ... < w_n = w_max.
struct WealthGrid {
  double w_min = 1e-3;
  double w_max = 10.0;
  std::size_t n = 128;
  // Interpolation in (log w, log V).
  Interpolation order = Interpolation::MonotoneCubic;

  void check() const;
  std::vector<double> nodes() const;
};

enum class IncomeMode { Auto, Reduced, Full };

// Per-period grids. Period t+1 is stretched so that every reachable
// next-period wealth R s + y with s on period t's grid stays below its top
// node; reachable wealth below the bottom node is extrapolated.
struct GridPlan {
  std::vector<WealthGrid> wealth;
  // Permanent-income nodes per period (full two-dimensional mode only).
  std::vector<std::vector<double>> permanent;
  // Income state collapsed to x = w / p; wealth grids are then in x.
  bool reduced = false;
  bool has_income = false;
};

// Homogeneous aggregators, homogeneous certainty equivalents and a terminal
// utility without intercept: V(w, p) = p V(w / p, 1).
bool income_reducible(const Setting& s);

// One plan shared by all settings (same horizon), so their solutions can be
// compared node by node.
GridPlan plan_grids(const std::vector<const Setting*>& settings, const WealthGrid& base,
                    IncomeMode mode = IncomeMode::Auto, std::size_t permanent_nodes = 9);

}  // namespace eislab
