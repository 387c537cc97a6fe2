#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: central finite differences, grid search over the budget simplex,
// exhaustive binary enumeration, and small random model generators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "robustsense/core.hpp"
#include "robustsense/lp.hpp"
#include "robustsense/milp.hpp"
#include "robustsense/rng.hpp"

namespace oracle {

inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> u, double h = 1e-5) {
  std::vector<double> g(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    const double keep = u[t];
    u[t] = keep + h;
    double fp = f(u);
    u[t] = keep - h;
    double fm = f(u);
    u[t] = keep;
    g[t] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// minimize `value` over {z >= 0, sum z = budget} on a composition grid with
// `steps` increments; the best grid value is an upper bound on the true min
inline double simplex_grid_min(const std::function<double(const std::vector<double>&)>& value,
                               int dims, double budget, int steps) {
  std::vector<double> z(dims, 0.0);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int)> rec = [&](int d, int left) {
    if (d == dims - 1) {
      z[d] = budget * left / steps;
      best = std::min(best, value(z));
      return;
    }
    for (int take = 0; take <= left; ++take) {
      z[d] = budget * take / steps;
      rec(d + 1, left - take);
    }
  };
  rec(0, steps);
  return best;
}

// exhaustive MILP oracle: enumerate binary assignments, solve the continuous
// rest with the LP solver
inline robustsense::SolveReport brute_force_milp(const robustsense::MilpModel& model) {
  using namespace robustsense;
  const int nb = static_cast<int>(model.binaries.size());
  SolveReport best;
  best.status = SolveStatus::Infeasible;
  for (long mask = 0; mask < (1L << nb); ++mask) {
    LinearProgram lp = model.lp;
    bool ok = true;
    for (int i = 0; i < nb && ok; ++i) {
      double v = (mask >> i) & 1 ? 1.0 : 0.0;
      int j = model.binaries[i];
      if (v < lp.bounds[j].lower - 1e-12 || v > lp.bounds[j].upper + 1e-12) ok = false;
      lp.bounds[j] = VarBounds{v, v};
    }
    if (!ok) continue;
    SolveReport rep = solve_lp(lp);
    if (rep.status != SolveStatus::Optimal) continue;
    if (best.status == SolveStatus::Infeasible || rep.value < best.value - 1e-12) {
      best = rep;
      best.status = SolveStatus::Optimal;
    }
  }
  return best;
}

// small random mixed-binary model; a share of the draws is infeasible on
// purpose so both statuses get exercised
inline robustsense::MilpModel random_milp(robustsense::Rng& rng, int max_binaries = 10) {
  using namespace robustsense;
  MilpModel m;
  const int nb = rng.uniform_int(1, max_binaries);
  const int nc = rng.uniform_int(0, 3);
  const int n = nc + nb;  // continuous first
  m.lp.objective.resize(n);
  m.lp.bounds.resize(n);
  for (int j = 0; j < n; ++j) m.lp.objective[j] = rng.uniform(-5.0, 5.0);
  for (int j = 0; j < nc; ++j) {
    double lo = rng.uniform(-4.0, 0.0);
    m.lp.bounds[j] = VarBounds{lo, lo + rng.uniform(0.5, 6.0)};
  }
  for (int j = nc; j < n; ++j) {
    m.lp.bounds[j] = VarBounds{0.0, 1.0};
    m.binaries.push_back(j);
  }
  const int rows = rng.uniform_int(1, 5);
  for (int r = 0; r < rows; ++r) {
    LinearConstraint c;
    c.coeffs.resize(n);
    for (int j = 0; j < n; ++j)
      c.coeffs[j] = rng.uniform01() < 0.3 ? 0.0 : rng.uniform(-4.0, 4.0);
    int rel = rng.uniform_int(0, 5);
    c.rel = rel == 0 ? Relation::Equal
                     : (rel <= 3 ? Relation::LessEqual : Relation::GreaterEqual);
    c.rhs = rng.uniform(-6.0, 8.0);
    m.lp.rows.push_back(std::move(c));
  }
  return m;
}

}  // namespace oracle
