#pragma once

#include <span>
#include <string>

namespace eislab {

// Probabilities must lie in [0, 1] and sum to one within `tol`. Returns an
// empty string when valid, otherwise a description of the first violation.
std::string probability_problem(std::span<const double> probs, double tol = 1e-12);

double mean(std::span<const double> values, std::span<const double> probs);

// a >=_FOSD b: F_a(x) <= F_b(x) at every support point of either distribution.
bool fosd_dominates(std::span<const double> a_values, std::span<const double> a_probs,
                    std::span<const double> b_values, std::span<const double> b_probs,
                    double tol = 1e-12);

// a >=_SOSD b: E_a[(x - X)^+] <= E_b[(x - X)^+] at every support point.
bool sosd_dominates(std::span<const double> a_values, std::span<const double> a_probs,
                    std::span<const double> b_values, std::span<const double> b_probs,
                    double tol = 1e-12);

}  // namespace eislab
