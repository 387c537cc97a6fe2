#include <cmath>
#include <stdexcept>

#include "robustsense/milp.hpp"

namespace robustsense {

namespace {

// value interval of an affine piece over the variable box
std::pair<double, double> piece_range(const BilinearAffinePiece& p,
                                      const std::vector<double>& u,
                                      const std::vector<VarBounds>& bounds) {
  double ip_lo = 0.0, ip_hi = 0.0;
  for (const auto& l : p.loadings) {
    double c = u[l.param] * l.coeff;
    double a = c * bounds[l.var].lower;
    double b = c * bounds[l.var].upper;
    ip_lo += std::min(a, b);
    ip_hi += std::max(a, b);
  }
  double v1 = p.slope * (p.base - ip_lo) + p.intercept;
  double v2 = p.slope * (p.base - ip_hi) + p.intercept;
  return {std::min(v1, v2), std::max(v1, v2)};
}

}  // namespace

std::vector<double> LinearizedModel::decisions(const std::vector<double>& milp_x) const {
  return {milp_x.begin(), milp_x.begin() + n_decision};
}

std::vector<double> LinearizedModel::block_values(const std::vector<double>& milp_x) const {
  std::vector<double> vals;
  vals.reserve(block_aux.size());
  for (int j : block_aux) vals.push_back(milp_x[j]);
  return vals;
}

LinearizedModel linearize_summax(const ProblemInstance& inst) {
  return linearize_summax(inst, nominal_parameters(inst));
}

LinearizedModel linearize_summax(const ProblemInstance& inst,
                                 const std::vector<std::vector<double>>& u) {
  validate(inst);
  if (u.size() != inst.blocks.size())
    throw std::invalid_argument("parameter list does not match block count");
  for (std::size_t k = 0; k < inst.blocks.size(); ++k)
    for (const auto& t : inst.blocks[k].terms)
      if (std::holds_alternative<NegExpDetection>(t))
        throw std::invalid_argument("block " + std::to_string(k) +
                                    " has a detection term; use the search solver");

  const int n = inst.feasible.n_vars();
  const int nb = static_cast<int>(inst.blocks.size());
  LinearizedModel out;
  out.n_decision = n;
  auto& lp = out.model.lp;

  lp.objective = inst.f0;
  lp.objective.resize(n + nb, 1.0);  // one epigraph variable per block
  lp.bounds = inst.feasible.bounds;
  lp.bounds.resize(n + nb);
  out.block_aux.resize(nb);
  for (int k = 0; k < nb; ++k) out.block_aux[k] = n + k;

  for (const auto& c : inst.feasible.constraints) {
    LinearConstraint row = c;
    row.coeffs.resize(n + nb, 0.0);
    lp.rows.push_back(std::move(row));
  }

  for (int k = 0; k < nb; ++k) {
    const auto& blk = inst.blocks[k];
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = -std::numeric_limits<double>::infinity();
    for (const auto& term : blk.terms) {
      const auto& p = std::get<BilinearAffinePiece>(term);
      auto [lo, hi] = piece_range(p, u[k], inst.feasible.bounds);
      t_lo = std::max(t_lo, lo);
      t_hi = std::max(t_hi, hi);
      // t_k >= slope*(base - sum u_t z_t(x)) + intercept
      LinearConstraint row;
      row.coeffs.assign(n + nb, 0.0);
      for (const auto& l : p.loadings) row.coeffs[l.var] -= p.slope * u[k][l.param] * l.coeff;
      row.coeffs[n + k] = -1.0;
      row.rel = Relation::LessEqual;
      row.rhs = -p.slope * p.base - p.intercept;
      lp.rows.push_back(std::move(row));
    }
    lp.bounds[n + k] = VarBounds{t_lo - 1.0, t_hi + 1.0};
  }

  for (int j = inst.feasible.n_cont; j < n; ++j) out.model.binaries.push_back(j);
  return out;
}

}  // namespace robustsense
