#include "robustsense/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace robustsense {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  double bound = 0.0;
  long seq = 0;
  std::vector<VarBounds> bounds;
  std::vector<double> x;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // FIFO on ties
  }
};

int most_fractional_binary(const std::vector<double>& x, const std::vector<int>& binaries) {
  int arg = -1;
  double best = kIntTol;
  for (int j : binaries) {
    double frac = std::fabs(x[j] - std::round(x[j]));
    if (frac > best) {
      best = frac;
      arg = j;
    }
  }
  return arg;
}

}  // namespace

SolveReport solve_milp(const MilpModel& model, double gap_tol, double time_limit_seconds) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (gap_tol < 0.0) throw std::invalid_argument("gap tolerance must be nonnegative");
  for (int j : model.binaries) {
    if (j < 0 || j >= model.lp.n_vars())
      throw std::invalid_argument("binary index " + std::to_string(j) + " out of range");
    if (model.lp.bounds[j].lower < -kIntTol || model.lp.bounds[j].upper > 1.0 + kIntTol)
      throw std::invalid_argument("binary variable " + std::to_string(j) +
                                  " has bounds outside [0,1]");
  }

  SolveReport rep;
  rep.status = SolveStatus::Infeasible;
  long node_count = 0;
  long seq = 0;

  LinearProgram work = model.lp;
  SolveReport root = solve_lp(work);
  ++node_count;
  if (root.status == SolveStatus::Infeasible) {
    rep.node_count = node_count;
    rep.wall_seconds = elapsed();
    return rep;
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{root.value, seq++, model.lp.bounds, std::move(root.x)});

  bool have_incumbent = false;
  double inc_value = 0.0;
  std::vector<double> inc_x;
  double global_bound = root.value;
  bool timed_out = false;

  while (!open.empty()) {
    Node node = open.top();
    global_bound = node.bound;
    if (have_incumbent) {
      double gap = inc_value - global_bound;
      if (gap <= gap_tol * std::max(1.0, std::fabs(inc_value)) + 1e-12) break;
    }
    if (elapsed() > time_limit_seconds) {
      timed_out = true;
      break;
    }
    open.pop();
    if (have_incumbent && node.bound >= inc_value - 1e-12 * std::max(1.0, std::fabs(inc_value))) {
      global_bound = inc_value;
      continue;
    }

    int branch = most_fractional_binary(node.x, model.binaries);
    if (branch < 0) {
      // integer feasible
      if (!have_incumbent || node.bound < inc_value - 1e-12) {
        have_incumbent = true;
        inc_value = node.bound;
        inc_x = node.x;
        for (int j : model.binaries) inc_x[j] = std::round(inc_x[j]);
      }
      continue;
    }

    for (int side = 0; side < 2; ++side) {
      work.bounds = node.bounds;
      if (side == 0)
        work.bounds[branch].upper = 0.0;
      else
        work.bounds[branch].lower = 1.0;
      SolveReport child = solve_lp(work);
      ++node_count;
      if (child.status == SolveStatus::Infeasible) continue;
      if (have_incumbent &&
          child.value >= inc_value - 1e-12 * std::max(1.0, std::fabs(inc_value)))
        continue;
      open.push(Node{child.value, seq++, work.bounds, std::move(child.x)});
    }
  }

  if (open.empty()) global_bound = have_incumbent ? inc_value : global_bound;
  rep.node_count = node_count;
  rep.wall_seconds = elapsed();
  if (!have_incumbent) {
    rep.status = timed_out ? SolveStatus::GapReached : SolveStatus::Infeasible;
    rep.bound = global_bound;
    rep.value = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.x = std::move(inc_x);
  rep.value = inc_value;
  rep.bound = std::min(global_bound, inc_value);
  double gap = rep.value - rep.bound;
  rep.status = gap <= gap_tol * std::max(1.0, std::fabs(rep.value)) + 1e-12
                   ? SolveStatus::Optimal
                   : SolveStatus::GapReached;
  return rep;
}

}  // namespace robustsense
