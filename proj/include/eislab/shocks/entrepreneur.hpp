#pragma once

#include <vector>

#include "eislab/core/setting.hpp"

namespace eislab {

// Gross return per unit of savings of one composite choice in every state:
//   a (1 + (1-tau) r) + ((1-tau) P'(1-delta) + tau P) k + (1-tau) pi(k) - b (1 + (1-tau) r_b)
// with k = capital_outlay / P, a = 1 - P k + b, labor chosen by per-state
// profit maximization. Throws PreconditionError on leverage above the cap,
// negative financial assets, or a non-positive return (debt that can default).
std::vector<double> entrepreneur_reduce(const EntrepreneurBlock& e, const EntrepreneurChoice& choice);

// All composite choices spanned by the block's financial portfolios, capital
// grid and leverage grid (with nonnegative financial assets).
std::vector<EntrepreneurChoice> entrepreneur_choices(const EntrepreneurBlock& e);

// Fills returns and entrepreneur_choices of every transition carrying an
// entrepreneur block. When choices are already present they are kept.
void reduce_entrepreneur_blocks(Setting& s);

}  // namespace eislab
