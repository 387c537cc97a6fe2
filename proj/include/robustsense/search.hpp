#pragma once

#include <cstdint>
#include <vector>

#include "robustsense/core.hpp"
#include "robustsense/lp.hpp"

namespace robustsense {

// Single-searcher effort-allocation model: pick at most `cap` cells, split
// `budget` hours among them, minimize the probability of missing the target.
struct SearchInstance {
  std::vector<double> priors;        // beta_k > 0
  std::vector<double> sweep;         // nominal sweep width per cell (miles)
  std::vector<std::uint8_t> perturbable;
  double speed = 0.0;                // eta (mph)
  double cell_area = 0.0;            // alpha (square miles)
  double budget = 0.0;               // tau (hours)
  int cap = 0;                       // kappa
  double radius = 0.0;               // delta of interest (miles)

  int size() const { return static_cast<int>(priors.size()); }
  // exponential decay coefficient per allocated hour in cell k
  double rate(double u_k) const { return speed * u_k / cell_area; }
};

void validate(const SearchInstance& si);

struct InnerAllocation {
  std::vector<double> z;   // full length, zero off the selection
  double value = 0.0;      // objective over all cells
  double multiplier = 0.0; // common marginal detection rate
};

/// Water-filling allocation over the selected cells: z_k solves
/// beta_k c_k e^{-c_k z_k} = lambda with the budget exhausted, lambda found
/// by bisection on the bracket [min beta c e^{-c tau}, max beta c].
InnerAllocation inner_allocation(const std::vector<int>& selected, const SearchInstance& si,
                                 const std::vector<double>& u);

struct SearchSolveOptions {
  bool prune = true;  // dominance pruning of the subset enumeration
};

/// Exact optimum over cell subsets of size <= cap. Decision layout of the
/// report: z in [0, s), y in [s, 2s). Deterministic lexicographic tie-break.
SolveReport solve_search(const SearchInstance& si, const std::vector<double>& u,
                         const SearchSolveOptions& opts = {});

/// The same model as a generic problem instance (z continuous, y binary,
/// one detection block per cell).
ProblemInstance to_problem_instance(const SearchInstance& si);

/// Structural inverse of to_problem_instance; throws if the instance does
/// not have the search shape. Only the speed/area ratio is recoverable, so
/// the result uses cell_area = 1.
SearchInstance search_from_problem(const ProblemInstance& inst);

}  // namespace robustsense
