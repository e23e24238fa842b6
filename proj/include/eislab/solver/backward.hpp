#pragma once

#include <cstddef>

#include "eislab/core/setting.hpp"
#include "eislab/solver/grid.hpp"
#include "eislab/solver/solution.hpp"

namespace eislab {

struct SolveOptions {
  IncomeMode income = IncomeMode::Auto;
  std::size_t permanent_nodes = 9;
  // Grid nodes within a period are solved on this many threads.
  std::size_t workers = 1;
};

// Backward induction on tabulated value functions. For t = T-1..0:
//   v_t(s) = max_theta M_t(V_{t+1}(W_{t+1}(s, theta)))   at every savings node,
//   V_t(w) = max_{0 < c < w} f_t(c, v_t(w - c))           at every wealth node.
// Throws DomainError when next-period wealth leaves the grid.
Solution solve_backward(const Setting& s, const GridPlan& plan, const SolveOptions& opt = {});
Solution solve_backward(const Setting& s, const WealthGrid& grid, const SolveOptions& opt = {});

}  // namespace eislab
