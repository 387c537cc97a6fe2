#pragma once

#include <string>
#include <vector>

#include "robustsense/core.hpp"

namespace robustsense {

// min c'x s.t. rows, lo <= x <= up. All bounds finite.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<LinearConstraint> rows;
  std::vector<VarBounds> bounds;

  int n_vars() const { return static_cast<int>(objective.size()); }
};

enum class SolveStatus { Optimal, GapReached, Infeasible };

const char* status_name(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;
  double value = 0.0;
  double bound = 0.0;  // best lower bound; equals value at Optimal
  long node_count = 0;
  double wall_seconds = 0.0;
};

/// Bounded-variable two-phase tableau simplex, Dantzig pricing with Bland
/// anti-cycling fallback. Primal feasible to 1e-8, reduced costs to 1e-9.
SolveReport solve_lp(const LinearProgram& lp);

/// MPS-style fixed-width text dump (NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA),
/// rows named R<i>, columns X<j>, objective row COST.
std::string dump_lp(const LinearProgram& lp, const std::string& name = "robustsense");

}  // namespace robustsense
