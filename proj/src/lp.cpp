#include "robustsense/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace robustsense {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapReached: return "gap_reached";
    case SolveStatus::Infeasible: return "infeasible";
  }
  std::abort();
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-8;
constexpr double kDegenerateStep = 1e-11;
constexpr int kDegenerateLimit = 60;

enum class ColStatus : unsigned char { Basic, AtLower, AtUpper };

// Dense bounded-variable tableau simplex over structural + slack +
// artificial columns. One instance per phase pair; rebuilt per solve.
class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp) : n_(lp.n_vars()), rows_(lp.rows.size()) {
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(lp.bounds[j].lower) || !std::isfinite(lp.bounds[j].upper))
        throw std::invalid_argument("variable " + std::to_string(j) + " has non-finite bounds");
      if (lp.bounds[j].lower > lp.bounds[j].upper + 1e-12)
        throw std::invalid_argument("variable " + std::to_string(j) + " has empty bounds");
    }
    cols_ = n_ + rows_;  // artificials appended on demand
    lo_.resize(cols_);
    up_.resize(cols_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.bounds[j].lower;
      up_[j] = std::max(lp.bounds[j].lower, lp.bounds[j].upper);
    }
    t_.assign(rows_, std::vector<double>(cols_, 0.0));
    basic_.resize(rows_);
    xb_.resize(rows_);
    status_.assign(cols_, ColStatus::AtLower);

    for (int i = 0; i < rows_; ++i) {
      const auto& row = lp.rows[i];
      double big = std::fabs(row.rhs) + 1.0;
      for (int j = 0; j < n_; ++j) {
        t_[i][j] = row.coeffs[j];
        big += std::fabs(row.coeffs[j]) * std::max(std::fabs(lo_[j]), std::fabs(up_[j]));
      }
      const int slack = n_ + i;
      t_[i][slack] = 1.0;
      switch (row.rel) {
        case Relation::LessEqual:
          lo_[slack] = 0.0;
          up_[slack] = big;
          break;
        case Relation::Equal:
          lo_[slack] = 0.0;
          up_[slack] = 0.0;
          break;
        case Relation::GreaterEqual:
          lo_[slack] = -big;
          up_[slack] = 0.0;
          break;
      }
      // residual with structurals at lower bound
      double resid = row.rhs;
      for (int j = 0; j < n_; ++j) resid -= row.coeffs[j] * lo_[j];
      if (resid >= lo_[slack] - kFeasTol && resid <= up_[slack] + kFeasTol) {
        basic_[i] = slack;
        xb_[i] = std::clamp(resid, lo_[slack], up_[slack]);
        status_[slack] = ColStatus::Basic;
      } else {
        // clamp the slack to its nearest bound, cover the rest by an
        // artificial; negate the row when the residual is negative so the
        // artificial enters the basis with a +1 column
        double s = resid < lo_[slack] ? lo_[slack] : up_[slack];
        status_[slack] = resid < lo_[slack] ? ColStatus::AtLower : ColStatus::AtUpper;
        double r = resid - s;
        const int art = add_artificial_column();
        if (r < 0.0)
          for (int j = 0; j < cols_; ++j) t_[i][j] = -t_[i][j];
        t_[i][art] = 1.0;
        basic_[i] = art;
        xb_[i] = std::fabs(r);
        status_[art] = ColStatus::Basic;
      }
    }
  }

  int n_structural() const { return n_; }
  int n_artificial() const { return cols_ - n_ - rows_; }

  bool has_artificials() const { return n_artificial() > 0; }

  // minimize the given costs (length cols_, zero-extended); returns false on
  // iteration blowup (treated as a hard numerical failure upstream)
  void optimize(const std::vector<double>& cost) {
    std::vector<double> d(cols_);
    recompute_cost_row(cost, d);

    long max_iter = 20000 + 200L * (rows_ + cols_);
    int degenerate_run = 0;
    bool bland = false;
    for (long iter = 0; iter < max_iter; ++iter) {
      int enter = -1, dir = 0;
      double merit = kCostTol;
      for (int j = 0; j < cols_; ++j) {
        if (status_[j] == ColStatus::Basic) continue;
        if (lo_[j] == up_[j]) continue;  // fixed column can never improve
        double m = 0.0;
        int dj = 0;
        if (status_[j] == ColStatus::AtLower && d[j] < -kCostTol) {
          m = -d[j];
          dj = +1;
        } else if (status_[j] == ColStatus::AtUpper && d[j] > kCostTol) {
          m = d[j];
          dj = -1;
        } else {
          continue;
        }
        if (bland) {
          enter = j;
          dir = dj;
          break;
        }
        if (m > merit) {
          merit = m;
          enter = j;
          dir = dj;
        }
      }
      if (enter < 0) return;  // optimal

      // ratio test
      double theta = up_[enter] - lo_[enter];  // bound flip distance
      int leave_row = -1;
      for (int i = 0; i < rows_; ++i) {
        double a = dir * t_[i][enter];
        double ti;
        if (a > kPivotEps) {
          ti = (xb_[i] - lo_[basic_[i]]) / a;
        } else if (a < -kPivotEps) {
          ti = (xb_[i] - up_[basic_[i]]) / a;
        } else {
          continue;
        }
        if (ti < -1e-12) ti = 0.0;
        if (ti < theta - 1e-12 ||
            (ti < theta + 1e-12 && leave_row >= 0 && basic_[i] < basic_[leave_row])) {
          theta = ti;
          leave_row = i;
        }
      }
      if (theta >= 1e290)
        throw std::runtime_error("LP unbounded despite finite bounds (numerical failure)");

      if (theta <= kDegenerateStep) {
        if (++degenerate_run > kDegenerateLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      for (int i = 0; i < rows_; ++i) xb_[i] -= theta * dir * t_[i][enter];
      if (leave_row < 0) {
        // bound flip, basis unchanged
        status_[enter] =
            status_[enter] == ColStatus::AtLower ? ColStatus::AtUpper : ColStatus::AtLower;
        continue;
      }
      const int leave = basic_[leave_row];
      double enter_val =
          status_[enter] == ColStatus::AtLower ? lo_[enter] + theta : up_[enter] - theta;
      status_[leave] = dir * t_[leave_row][enter] > 0.0 ? ColStatus::AtLower : ColStatus::AtUpper;
      pivot(leave_row, enter, d);
      status_[enter] = ColStatus::Basic;
      basic_[leave_row] = enter;
      xb_[leave_row] = enter_val;
    }
    throw std::runtime_error("simplex iteration limit exceeded");
  }

  double phase1_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i)
      if (basic_[i] >= n_ + rows_) s += xb_[i];
    return s;
  }

  // after phase 1: pivot basic artificials out where possible, then freeze
  // all artificial columns at zero
  void retire_artificials() {
    for (int i = 0; i < rows_; ++i) {
      if (basic_[i] < n_ + rows_) continue;
      int pivot_col = -1;
      for (int j = 0; j < n_ + rows_; ++j) {
        if (status_[j] == ColStatus::Basic) continue;
        if (std::fabs(t_[i][j]) > 1e-7) {
          pivot_col = j;
          break;
        }
      }
      if (pivot_col < 0) continue;  // redundant row, artificial stays basic at 0
      const int art = basic_[i];
      std::vector<double> dummy(cols_, 0.0);
      double val = status_[pivot_col] == ColStatus::AtLower ? lo_[pivot_col] : up_[pivot_col];
      status_[art] = ColStatus::AtLower;
      pivot(i, pivot_col, dummy);
      status_[pivot_col] = ColStatus::Basic;
      basic_[i] = pivot_col;
      xb_[i] = val;  // artificial was at 0, pivot keeps the basic value
    }
    for (int j = n_ + rows_; j < cols_; ++j) {
      lo_[j] = 0.0;
      up_[j] = 0.0;
    }
  }

  std::vector<double> structural_solution() const {
    std::vector<double> x(n_);
    for (int j = 0; j < n_; ++j)
      x[j] = status_[j] == ColStatus::AtUpper ? up_[j] : lo_[j];
    for (int i = 0; i < rows_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = xb_[i];
    return x;
  }

 private:
  int add_artificial_column() {
    for (auto& row : t_) row.push_back(0.0);
    lo_.push_back(0.0);
    double big = 0.0;
    for (int i = 0; i < rows_; ++i) big = std::max(big, std::fabs(xb_[i]));
    up_.push_back(std::max(1.0, big) * 4.0 + 1e3);
    status_.push_back(ColStatus::AtLower);
    return cols_++;
  }

  void recompute_cost_row(const std::vector<double>& cost, std::vector<double>& d) {
    // d = c - c_B^T * T, computed row-wise
    for (int j = 0; j < cols_; ++j)
      d[j] = j < static_cast<int>(cost.size()) ? cost[j] : 0.0;
    for (int i = 0; i < rows_; ++i) {
      double cb = basic_[i] < static_cast<int>(cost.size()) ? cost[basic_[i]] : 0.0;
      if (cb == 0.0) continue;
      const auto& row = t_[i];
      for (int j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
  }

  void pivot(int r, int c, std::vector<double>& d) {
    const double piv = t_[r][c];
    auto& prow = t_[r];
    const double inv = 1.0 / piv;
    for (int j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double f = t_[i][c];
      if (f == 0.0) continue;
      auto& row = t_[i];
      for (int j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    double f = d[c];
    if (f != 0.0) {
      for (int j = 0; j < cols_; ++j) d[j] -= f * prow[j];
      d[c] = 0.0;
    }
  }

  int n_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<double> lo_, up_, xb_;
  std::vector<int> basic_;
  std::vector<ColStatus> status_;
};

}  // namespace

SolveReport solve_lp(const LinearProgram& lp) {
  const auto start = std::chrono::steady_clock::now();
  if (static_cast<int>(lp.bounds.size()) != lp.n_vars())
    throw std::invalid_argument("bounds size does not match objective size");
  for (const auto& row : lp.rows)
    if (static_cast<int>(row.coeffs.size()) != lp.n_vars())
      throw std::invalid_argument("constraint row has wrong length");

  Tableau tab(lp);
  SolveReport rep;
  if (tab.has_artificials()) {
    std::vector<double> phase1(lp.n_vars() + static_cast<int>(lp.rows.size()), 0.0);
    phase1.resize(phase1.size() + tab.n_artificial(), 1.0);
    tab.optimize(phase1);
    if (tab.phase1_infeasibility() > kFeasTol) {
      rep.status = SolveStatus::Infeasible;
      rep.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return rep;
    }
    tab.retire_artificials();
  }
  std::vector<double> cost(lp.objective);
  tab.optimize(cost);

  rep.status = SolveStatus::Optimal;
  rep.x = tab.structural_solution();
  rep.value = 0.0;
  for (int j = 0; j < lp.n_vars(); ++j) rep.value += lp.objective[j] * rep.x[j];
  rep.bound = rep.value;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string dump_lp(const LinearProgram& lp, const std::string& name) {
  std::string out;
  char buf[160];
  auto add = [&out, &buf](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out += buf;
  };
  add("NAME          %s\n", name.c_str());
  out += "ROWS\n N  COST\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    char rel = lp.rows[i].rel == Relation::LessEqual ? 'L'
               : lp.rows[i].rel == Relation::Equal   ? 'E'
                                                     : 'G';
    add(" %c  R%-7zu\n", rel, i);
  }
  out += "COLUMNS\n";
  for (int j = 0; j < lp.n_vars(); ++j) {
    if (lp.objective[j] != 0.0) add("    X%-8d COST      %.12g\n", j, lp.objective[j]);
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
      if (lp.rows[i].coeffs[j] != 0.0)
        add("    X%-8d R%-8zu %.12g\n", j, i, lp.rows[i].coeffs[j]);
  }
  out += "RHS\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i)
    if (lp.rows[i].rhs != 0.0) add("    RHS       R%-8zu %.12g\n", i, lp.rows[i].rhs);
  out += "BOUNDS\n";
  for (int j = 0; j < lp.n_vars(); ++j) {
    add(" LO BND       X%-8d %.12g\n", j, lp.bounds[j].lower);
    add(" UP BND       X%-8d %.12g\n", j, lp.bounds[j].upper);
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace robustsense
