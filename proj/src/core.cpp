#include "robustsense/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace robustsense {

NormKind dual_of(NormKind k) {
  switch (k) {
    case NormKind::Abs: return NormKind::Abs;
    case NormKind::L2: return NormKind::L2;
    case NormKind::L1: return NormKind::Linf;
    case NormKind::Linf: return NormKind::L1;
  }
  std::abort();
}

const char* norm_name(NormKind k) {
  switch (k) {
    case NormKind::Abs: return "abs";
    case NormKind::L2: return "l2";
    case NormKind::L1: return "l1";
    case NormKind::Linf: return "linf";
  }
  std::abort();
}

NormKind norm_from_name(const std::string& name) {
  if (name == "abs") return NormKind::Abs;
  if (name == "l2") return NormKind::L2;
  if (name == "l1") return NormKind::L1;
  if (name == "linf") return NormKind::Linf;
  throw std::invalid_argument("unknown norm '" + name + "'");
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
  }
  std::abort();
}

double norm_value(const std::vector<double>& g, NormKind norm) {
  switch (norm) {
    case NormKind::Abs:
      if (g.size() != 1) throw std::invalid_argument("abs norm requires dimension 1");
      return std::fabs(g[0]);
    case NormKind::L2: {
      double s = 0.0;
      for (double v : g) s += v * v;
      return std::sqrt(s);
    }
    case NormKind::L1: {
      double s = 0.0;
      for (double v : g) s += std::fabs(v);
      return s;
    }
    case NormKind::Linf: {
      double m = 0.0;
      for (double v : g) m = std::max(m, std::fabs(v));
      return m;
    }
  }
  std::abort();
}

double dual_norm(const std::vector<double>& g, NormKind norm) {
  return norm_value(g, dual_of(norm));
}

std::vector<double> dual_norm_argmax(const std::vector<double>& g, NormKind norm) {
  const std::size_t n = g.size();
  std::vector<double> w(n, 0.0);
  switch (norm) {
    case NormKind::Abs:
      if (n != 1) throw std::invalid_argument("abs norm requires dimension 1");
      w[0] = g[0] >= 0.0 ? 1.0 : -1.0;
      if (g[0] == 0.0) w[0] = 0.0;
      return w;
    case NormKind::L2: {
      double nrm = norm_value(g, NormKind::L2);
      if (nrm == 0.0) return w;
      for (std::size_t i = 0; i < n; ++i) w[i] = g[i] / nrm;
      return w;
    }
    case NormKind::L1: {
      // maximize over the cross-polytope: mass on the largest |g_i|
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::fabs(g[i]) > std::fabs(g[best])) best = i;
      if (g[best] != 0.0) w[best] = g[best] > 0.0 ? 1.0 : -1.0;
      return w;
    }
    case NormKind::Linf: {
      for (std::size_t i = 0; i < n; ++i)
        w[i] = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
      return w;
    }
  }
  std::abort();
}

namespace {

int term_param_dim(const Term& t) {
  if (std::holds_alternative<NegExpDetection>(t)) return 1;
  const auto& p = std::get<BilinearAffinePiece>(t);
  int d = 0;
  for (const auto& l : p.loadings) d = std::max(d, l.param + 1);
  return d;
}

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw std::invalid_argument(what + " is not finite");
}

}  // namespace

void validate(const ProblemInstance& inst) {
  const int n = inst.feasible.n_vars();
  if (n <= 0) throw std::invalid_argument("instance has no decision variables");
  if (static_cast<int>(inst.feasible.bounds.size()) != n)
    throw std::invalid_argument("bounds size does not match variable count");
  if (static_cast<int>(inst.f0.size()) != n)
    throw std::invalid_argument("f0 size does not match variable count");
  if (inst.blocks.empty()) {
    bool any = false;
    for (double c : inst.f0) any = any || c != 0.0;
    if (!any) throw std::invalid_argument("instance needs at least one block or a nonzero f0");
  }
  for (int j = 0; j < n; ++j) {
    const auto& b = inst.feasible.bounds[j];
    check_finite(b.lower, "lower bound of variable " + std::to_string(j));
    check_finite(b.upper, "upper bound of variable " + std::to_string(j));
    if (b.lower > b.upper)
      throw std::invalid_argument("variable " + std::to_string(j) + " has lower > upper");
  }
  for (std::size_t r = 0; r < inst.feasible.constraints.size(); ++r) {
    if (static_cast<int>(inst.feasible.constraints[r].coeffs.size()) != n)
      throw std::invalid_argument("constraint " + std::to_string(r) + " has wrong length");
  }
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    const std::string where = "block " + std::to_string(k);
    if (blk.terms.empty()) throw std::invalid_argument(where + " has no terms");
    if (blk.dim() < 1) throw std::invalid_argument(where + " has empty nominal");
    if (blk.norm == NormKind::Abs && blk.dim() != 1)
      throw std::invalid_argument(where + ": abs norm on dimension " + std::to_string(blk.dim()));
    for (std::size_t i = 0; i < blk.terms.size(); ++i) {
      const Term& t = blk.terms[i];
      if (term_param_dim(t) > blk.dim())
        throw std::invalid_argument(where + " term " + std::to_string(i) +
                                    " exceeds the block parameter dimension");
      if (const auto* ne = std::get_if<NegExpDetection>(&t)) {
        if (blk.dim() != 1)
          throw std::invalid_argument(where + ": detection term on a non-scalar block");
        if (ne->var < 0 || ne->var >= n)
          throw std::invalid_argument(where + " term " + std::to_string(i) +
                                      " references variable " + std::to_string(ne->var));
      } else {
        const auto& p = std::get<BilinearAffinePiece>(t);
        for (const auto& l : p.loadings) {
          if (l.var < 0 || l.var >= n)
            throw std::invalid_argument(where + " term " + std::to_string(i) +
                                        " references variable " + std::to_string(l.var));
          if (l.param < 0 || l.param >= blk.dim())
            throw std::invalid_argument(where + " term " + std::to_string(i) +
                                        " references parameter " + std::to_string(l.param));
        }
      }
    }
  }
}

std::vector<double> piece_loading_values(const BilinearAffinePiece& piece, int dim,
                                         const std::vector<double>& x) {
  std::vector<double> z(dim, 0.0);
  for (const auto& l : piece.loadings) z[l.param] += l.coeff * x[l.var];
  return z;
}

double term_value(const Term& t, const std::vector<double>& u, const std::vector<double>& x) {
  if (const auto* ne = std::get_if<NegExpDetection>(&t)) {
    return ne->weight * std::exp(-ne->rate_scale * u[0] * x[ne->var]);
  }
  const auto& p = std::get<BilinearAffinePiece>(t);
  double ip = 0.0;
  for (const auto& l : p.loadings) ip += u[l.param] * l.coeff * x[l.var];
  return p.slope * (p.base - ip) + p.intercept;
}

std::vector<double> term_grad_u(const Term& t, const std::vector<double>& u,
                                const std::vector<double>& x) {
  if (const auto* ne = std::get_if<NegExpDetection>(&t)) {
    double e = std::exp(-ne->rate_scale * u[0] * x[ne->var]);
    return {-ne->weight * ne->rate_scale * x[ne->var] * e};
  }
  const auto& p = std::get<BilinearAffinePiece>(t);
  std::vector<double> g(u.size(), 0.0);
  for (const auto& l : p.loadings) g[l.param] -= p.slope * l.coeff * x[l.var];
  return g;
}

double evaluate_objective(const ProblemInstance& inst,
                          const std::vector<std::vector<double>>& u,
                          const std::vector<double>& x) {
  const int n = inst.feasible.n_vars();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("decision vector has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(n));
  if (u.size() != inst.blocks.size())
    throw std::invalid_argument("parameter list has " + std::to_string(u.size()) +
                                " blocks, expected " + std::to_string(inst.blocks.size()));
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += inst.f0[j] * x[j];
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    if (static_cast<int>(u[k].size()) != blk.dim())
      throw std::invalid_argument("parameter vector for block " + std::to_string(k) +
                                  " has dimension " + std::to_string(u[k].size()) +
                                  ", expected " + std::to_string(blk.dim()));
    double m = term_value(blk.terms[0], u[k], x);
    for (std::size_t i = 1; i < blk.terms.size(); ++i)
      m = std::max(m, term_value(blk.terms[i], u[k], x));
    total += m;
  }
  return total;
}

bool is_feasible(const ProblemInstance& inst, const std::vector<double>& x, double tol) {
  const int n = inst.feasible.n_vars();
  if (static_cast<int>(x.size()) != n) return false;
  for (int j = 0; j < n; ++j) {
    if (x[j] < inst.feasible.bounds[j].lower - tol) return false;
    if (x[j] > inst.feasible.bounds[j].upper + tol) return false;
  }
  for (const auto& c : inst.feasible.constraints) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
    switch (c.rel) {
      case Relation::LessEqual:
        if (lhs > c.rhs + tol) return false;
        break;
      case Relation::Equal:
        if (std::fabs(lhs - c.rhs) > tol) return false;
        break;
      case Relation::GreaterEqual:
        if (lhs < c.rhs - tol) return false;
        break;
    }
  }
  return true;
}

std::vector<std::vector<double>> nominal_parameters(const ProblemInstance& inst) {
  std::vector<std::vector<double>> u;
  u.reserve(inst.blocks.size());
  for (const auto& blk : inst.blocks) u.push_back(blk.nominal);
  return u;
}

}  // namespace robustsense
