#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "eislab/solver/backward.hpp"
#include "eislab/solver/solution.hpp"

namespace eislab {

// Rows (t, w, V, c, theta) at every wealth node; with a permanent-income state
// a p column follows t (reduced solutions are reported at the initial p).
void write_solution_csv(std::ostream& os, const Solution& sol);

// Canonical text of a setting and grid plan; equal texts mean equal problems
// (custom aggregators and technologies are identified by their description).
std::string canonical_text(const Setting& s, const GridPlan& plan);
// FNV-1a hash of the canonical text.
std::uint64_t setting_hash(const Setting& s, const GridPlan& plan);

// Binary cache of the tabulated part of a solution.
void save_cache(const std::filesystem::path& file, const Solution& sol, std::uint64_t key);
// Empty when the file is missing or was written for another key.
std::optional<Solution> load_cache(const std::filesystem::path& file, const Setting& s, std::uint64_t key);

// solve_backward with a cache file named after the hash inside `dir`.
Solution solve_cached(const Setting& s, const GridPlan& plan, const SolveOptions& opt,
                      const std::filesystem::path& dir);

}  // namespace eislab
