#pragma once

#include <vector>

#include "robustsense/core.hpp"
#include "robustsense/lp.hpp"

namespace robustsense {

struct MilpModel {
  LinearProgram lp;
  std::vector<int> binaries;  // indices with bounds inside [0, 1]
};

/// Best-bound branch-and-bound on the most-fractional binary (ties to the
/// lowest index). Optimal once the relative gap closes to gap_tol;
/// GapReached on time limit with a valid bound.
SolveReport solve_milp(const MilpModel& model, double gap_tol = 0.0,
                       double time_limit_seconds = 1e30);

// Linearized sum-of-max model: one epigraph variable per block, shared
// decision variables, plus a back-map onto the original instance.
struct LinearizedModel {
  MilpModel model;
  int n_decision = 0;
  std::vector<int> block_aux;  // column of t_k per block

  std::vector<double> decisions(const std::vector<double>& milp_x) const;
  std::vector<double> block_values(const std::vector<double>& milp_x) const;
};

/// Epigraph linearization of the instance at fixed parameters u (defaults to
/// the nominal). All terms must be affine pieces; detection terms belong to
/// the search solver.
LinearizedModel linearize_summax(const ProblemInstance& inst);
LinearizedModel linearize_summax(const ProblemInstance& inst,
                                 const std::vector<std::vector<double>>& u);

}  // namespace robustsense
