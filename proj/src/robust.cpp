#include "robustsense/robust.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "robustsense/milp.hpp"
#include "robustsense/rng.hpp"
#include "robustsense/search.hpp"

namespace robustsense {

const char* robust_mode_name(RobustMode m) {
  switch (m) {
    case RobustMode::ExactMonotone: return "exact_monotone";
    case RobustMode::ExactAffine: return "exact_affine";
    case RobustMode::SampledBracket: return "sampled_bracket";
  }
  std::abort();
}

std::vector<std::vector<double>> spec_center(const ProblemInstance& inst,
                                             const UncertaintySpec& spec) {
  if (spec.center.empty()) return nominal_parameters(inst);
  if (spec.center.size() != inst.blocks.size())
    throw std::invalid_argument("uncertainty center does not match block count");
  for (std::size_t k = 0; k < inst.blocks.size(); ++k)
    if (static_cast<int>(spec.center[k].size()) != inst.blocks[k].dim())
      throw std::invalid_argument("uncertainty center of block " + std::to_string(k) +
                                  " has the wrong dimension");
  return spec.center;
}

namespace {

enum class BlockKind { Affine, Detection, Mixed };

BlockKind block_kind(const MaxBlock& blk) {
  bool aff = false, det = false;
  for (const auto& t : blk.terms) {
    if (std::holds_alternative<NegExpDetection>(t))
      det = true;
    else
      aff = true;
  }
  if (aff && det) return BlockKind::Mixed;
  return det ? BlockKind::Detection : BlockKind::Affine;
}

}  // namespace

std::pair<double, std::vector<std::vector<double>>> worst_case_value(
    const ProblemInstance& inst, const std::vector<double>& x, const UncertaintySpec& spec) {
  const auto center = spec_center(inst, spec);
  const double delta = std::fabs(spec.radius);
  double total = 0.0;
  for (int j = 0; j < inst.feasible.n_vars(); ++j) total += inst.f0[j] * x[j];
  std::vector<std::vector<double>> witness(inst.blocks.size());

  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    const auto& u = center[k];
    if (!blk.perturbable || delta == 0.0) {
      double m = term_value(blk.terms[0], u, x);
      for (std::size_t i = 1; i < blk.terms.size(); ++i)
        m = std::max(m, term_value(blk.terms[i], u, x));
      total += m;
      witness[k] = u;
      continue;
    }
    switch (block_kind(blk)) {
      case BlockKind::Affine: {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        std::vector<double> arg_grad;
        for (std::size_t i = 0; i < blk.terms.size(); ++i) {
          std::vector<double> g = term_grad_u(blk.terms[i], u, x);
          double v = term_value(blk.terms[i], u, x) + delta * dual_norm(g, blk.norm);
          if (v > best) {
            best = v;
            arg = i;
            arg_grad = std::move(g);
          }
        }
        total += best;
        std::vector<double> w = dual_norm_argmax(arg_grad, blk.norm);
        witness[k] = u;
        for (int t = 0; t < blk.dim(); ++t) witness[k][t] += delta * w[t];
        (void)arg;
        break;
      }
      case BlockKind::Detection: {
        // each term is nonincreasing in u when the referenced effort is
        // nonnegative, so the sup sits at u - delta
        for (const auto& t : blk.terms) {
          const auto& ne = std::get<NegExpDetection>(t);
          if (x[ne.var] < -1e-12)
            throw std::runtime_error("no exact rule: negative effort in block " +
                                     std::to_string(k));
        }
        std::vector<double> u_worst = u;
        for (double& v : u_worst) v -= delta;
        double m = term_value(blk.terms[0], u_worst, x);
        for (std::size_t i = 1; i < blk.terms.size(); ++i)
          m = std::max(m, term_value(blk.terms[i], u_worst, x));
        total += m;
        witness[k] = u_worst;
        break;
      }
      case BlockKind::Mixed:
        throw std::runtime_error("no exact rule: block " + std::to_string(k) +
                                 " mixes term kinds");
    }
  }
  return {total, witness};
}

namespace {

struct Augmentation {
  bool ok = false;
  // linear part indexed by decision variable, plus a constant
  std::vector<std::pair<int, double>> var_coeffs;
  double constant = 0.0;
  double max_value = 0.0;  // upper bound of the term over the box
};

// delta * || slope * z(x) ||_* as a linear function of x over the variable
// box; feasible when the dual norm is of l1 type (or the block is scalar)
// and every loading coordinate has a fixed sign, or when z(x) is constant.
Augmentation linear_augmentation(const BilinearAffinePiece& p, const MaxBlock& blk,
                                 const std::vector<VarBounds>& bounds, double delta) {
  Augmentation out;
  const int dim = blk.dim();
  const double a = std::fabs(p.slope);
  if (a == 0.0 || delta == 0.0) {
    out.ok = true;
    return out;
  }
  std::vector<double> zlo(dim, 0.0), zhi(dim, 0.0);
  for (const auto& l : p.loadings) {
    double v1 = l.coeff * bounds[l.var].lower;
    double v2 = l.coeff * bounds[l.var].upper;
    zlo[l.param] += std::min(v1, v2);
    zhi[l.param] += std::max(v1, v2);
  }
  const bool l1_dual = blk.norm == NormKind::Linf || dim == 1;
  std::vector<double> sign(dim, 0.0);
  bool all_const = true;
  for (int t = 0; t < dim; ++t) {
    if (zhi[t] - zlo[t] > 1e-12) all_const = false;
    if (zlo[t] >= -1e-12)
      sign[t] = 1.0;
    else if (zhi[t] <= 1e-12)
      sign[t] = -1.0;
  }
  if (all_const) {
    std::vector<double> g(dim);
    for (int t = 0; t < dim; ++t) g[t] = p.slope * 0.5 * (zlo[t] + zhi[t]);
    out.ok = true;
    out.constant = delta * dual_norm(g, blk.norm);
    out.max_value = out.constant;
    return out;
  }
  if (!l1_dual) return out;
  for (int t = 0; t < dim; ++t)
    if (sign[t] == 0.0 && (zlo[t] < -1e-12 || zhi[t] > 1e-12)) return out;  // sign not fixed

  out.ok = true;
  for (const auto& l : p.loadings) {
    double c = delta * a * sign[l.param] * l.coeff;
    if (c != 0.0) out.var_coeffs.emplace_back(l.var, c);
  }
  for (int t = 0; t < dim; ++t)
    out.max_value += delta * a * std::max(std::fabs(zlo[t]), std::fabs(zhi[t]));
  return out;
}

RobustReport exact_detection_path(const ProblemInstance& inst,
                                  const std::vector<std::vector<double>>& center, double delta,
                                  const UncertaintySpec& spec, SolverSelector selector) {
  if (selector == SolverSelector::Milp)
    throw std::invalid_argument("detection instances require the search solver");
  SearchInstance si = search_from_problem(inst);
  std::vector<double> u(si.size());
  for (int k = 0; k < si.size(); ++k) {
    si.sweep[k] = center[k][0];
    u[k] = si.perturbable[k] ? center[k][0] - delta : center[k][0];
    if (!(u[k] > 0.0))
      throw std::runtime_error("no exact rule: radius wipes out the sweep width of cell " +
                               std::to_string(k));
  }
  SolveReport rep = solve_search(si, u);
  RobustReport out;
  out.mode = RobustMode::ExactMonotone;
  out.x = rep.x;
  out.solve = rep;
  UncertaintySpec eff = spec;
  eff.radius = delta;
  auto [value, wit] = worst_case_value(inst, out.x, eff);
  out.lower = out.upper = rep.value;
  out.witness = std::move(wit);
  (void)value;
  return out;
}

RobustReport exact_affine_path(const ProblemInstance& inst,
                               const std::vector<std::vector<double>>& center, double delta,
                               const UncertaintySpec& spec, SolverSelector selector) {
  if (selector == SolverSelector::SearchEnumeration)
    throw std::invalid_argument("affine instances require the MILP solver");
  LinearizedModel lin = linearize_summax(inst, center);
  // worst-case augmentation on each epigraph row; rows follow the original
  // constraints, ordered block-major then term-major
  std::size_t row = inst.feasible.constraints.size();
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    double bump = 0.0;
    for (std::size_t i = 0; i < blk.terms.size(); ++i, ++row) {
      if (!blk.perturbable || delta == 0.0) continue;
      const auto& p = std::get<BilinearAffinePiece>(blk.terms[i]);
      Augmentation aug = linear_augmentation(p, blk, inst.feasible.bounds, delta);
      if (!aug.ok)
        throw std::runtime_error("no exact rule: block " + std::to_string(k) + " term " +
                                 std::to_string(i) +
                                 " has no linear worst-case augmentation");
      auto& r = lin.model.lp.rows[row];
      for (auto [var, c] : aug.var_coeffs) r.coeffs[var] += c;
      r.rhs -= aug.constant;
      bump = std::max(bump, aug.max_value);
    }
    lin.model.lp.bounds[lin.block_aux[k]].upper += bump + 1.0;
  }
  SolveReport rep = solve_milp(lin.model);
  if (rep.status == SolveStatus::Infeasible)
    throw std::runtime_error("robust reformulation is infeasible");
  RobustReport out;
  out.mode = RobustMode::ExactAffine;
  out.x = lin.decisions(rep.x);
  out.solve = rep;
  UncertaintySpec eff = spec;
  eff.radius = delta;
  auto [value, wit] = worst_case_value(inst, out.x, eff);
  out.lower = out.upper = rep.value;
  out.witness = std::move(wit);
  (void)value;
  return out;
}

}  // namespace

RobustReport solve_robust_exact(const ProblemInstance& inst, const UncertaintySpec& spec,
                                SolverSelector selector) {
  validate(inst);
  const auto center = spec_center(inst, spec);
  const double delta = std::fabs(spec.radius);
  bool any_det = false, any_aff = false;
  for (const auto& blk : inst.blocks) {
    BlockKind bk = block_kind(blk);
    if (bk == BlockKind::Mixed)
      throw std::runtime_error("no exact rule: a block mixes term kinds");
    (bk == BlockKind::Detection ? any_det : any_aff) = true;
  }
  if (any_det && any_aff)
    throw std::runtime_error("no exact rule: instance mixes detection and affine blocks");
  if (any_det) return exact_detection_path(inst, center, delta, spec, selector);
  return exact_affine_path(inst, center, delta, spec, selector);
}

std::vector<std::vector<double>> sample_ball(int dim, NormKind norm, double delta, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  if (dim < 1) throw std::invalid_argument("dimension must be at least 1");
  if (delta < 0.0) throw std::invalid_argument("radius must be nonnegative");
  if (norm == NormKind::L1)
    throw std::invalid_argument("sampling is not supported for l1 blocks");
  if (norm == NormKind::Abs && dim != 1)
    throw std::invalid_argument("abs norm requires dimension 1");

  Rng rng(seed);
  std::vector<std::vector<double>> out(count, std::vector<double>(dim, 0.0));
  for (auto& w : out) {
    if (delta == 0.0) continue;
    if (norm == NormKind::L2) {
      double nrm = 0.0;
      do {
        nrm = 0.0;
        for (double& v : w) {
          v = rng.gaussian();
          nrm += v * v;
        }
        nrm = std::sqrt(nrm);
      } while (nrm < 1e-12);
      double r = delta * std::pow(rng.uniform01(), 1.0 / dim);
      for (double& v : w) v *= r / nrm;
    } else {  // Linf and Abs: componentwise uniform
      for (double& v : w) v = rng.uniform(-delta, delta);
    }
  }
  return out;
}

RobustReport solve_robust_sampled(const ProblemInstance& inst, const UncertaintySpec& spec,
                                  int count, std::uint64_t seed, SolverSelector selector) {
  validate(inst);
  if (selector == SolverSelector::SearchEnumeration)
    throw std::invalid_argument("scenario expansion requires the MILP solver");
  if (count < 1) throw std::invalid_argument("sample count must be at least 1");
  for (std::size_t k = 0; k < inst.blocks.size(); ++k)
    if (block_kind(inst.blocks[k]) != BlockKind::Affine)
      throw std::invalid_argument("block " + std::to_string(k) +
                                  " is not affine; the expanded model would not stay a MILP");

  const auto center = spec_center(inst, spec);
  const double delta = std::fabs(spec.radius);
  const int n = inst.feasible.n_vars();
  const int nb = static_cast<int>(inst.blocks.size());

  // scenario offsets; scenario 0 is the center itself
  std::vector<std::vector<std::vector<double>>> offsets(nb);
  for (int k = 0; k < nb; ++k) {
    const auto& blk = inst.blocks[k];
    offsets[k].assign(1, std::vector<double>(blk.dim(), 0.0));
    if (blk.perturbable && count > 1) {
      std::uint64_t block_seed = seed ^ (0x9E3779B97F4A7C15ULL * (k + 1));
      auto draws = sample_ball(blk.dim(), blk.norm, delta, count - 1, block_seed);
      offsets[k].insert(offsets[k].end(), draws.begin(), draws.end());
    }
  }
  auto scenario_u = [&](int k, int s) {
    std::vector<double> u = center[k];
    for (int t = 0; t < static_cast<int>(u.size()); ++t) u[t] += offsets[k][s][t];
    return u;
  };
  auto block_max = [&](int k, int s, const std::vector<double>& x) {
    const auto& blk = inst.blocks[k];
    std::vector<double> u = scenario_u(k, s);
    double m = term_value(blk.terms[0], u, x);
    for (std::size_t i = 1; i < blk.terms.size(); ++i)
      m = std::max(m, term_value(blk.terms[i], u, x));
    return m;
  };

  // epigraph bounds sized once over all scenarios
  std::vector<VarBounds> t_bounds(nb);
  for (int k = 0; k < nb; ++k) {
    const auto& blk = inst.blocks[k];
    double lo = -std::numeric_limits<double>::infinity(), hi = lo;
    for (std::size_t s = 0; s < offsets[k].size(); ++s) {
      std::vector<double> u = scenario_u(k, static_cast<int>(s));
      for (const auto& term : blk.terms) {
        const auto& p = std::get<BilinearAffinePiece>(term);
        double ip_lo = 0.0, ip_hi = 0.0;
        for (const auto& l : p.loadings) {
          double c = u[l.param] * l.coeff;
          double v1 = c * inst.feasible.bounds[l.var].lower;
          double v2 = c * inst.feasible.bounds[l.var].upper;
          ip_lo += std::min(v1, v2);
          ip_hi += std::max(v1, v2);
        }
        double v1 = p.slope * (p.base - ip_lo) + p.intercept;
        double v2 = p.slope * (p.base - ip_hi) + p.intercept;
        lo = std::max(lo, std::min(v1, v2));
        hi = std::max(hi, std::max(v1, v2));
      }
    }
    t_bounds[k] = VarBounds{lo - 1.0, hi + 1.0};
  }

  std::vector<std::vector<int>> active(nb, std::vector<int>{0});
  RobustReport out;
  out.mode = RobustMode::SampledBracket;
  out.sample_count = count;
  out.seed = seed;

  SolveReport rep;
  long total_nodes = 0;
  for (long guard = 0; guard <= static_cast<long>(count) * nb + 1; ++guard) {
    MilpModel model;
    auto& lp = model.lp;
    lp.objective = inst.f0;
    lp.objective.resize(n + nb, 1.0);
    lp.bounds = inst.feasible.bounds;
    for (int k = 0; k < nb; ++k) lp.bounds.push_back(t_bounds[k]);
    for (const auto& c : inst.feasible.constraints) {
      LinearConstraint row = c;
      row.coeffs.resize(n + nb, 0.0);
      lp.rows.push_back(std::move(row));
    }
    for (int k = 0; k < nb; ++k) {
      const auto& blk = inst.blocks[k];
      for (int s : active[k]) {
        std::vector<double> u = scenario_u(k, s);
        for (const auto& term : blk.terms) {
          const auto& p = std::get<BilinearAffinePiece>(term);
          LinearConstraint row;
          row.coeffs.assign(n + nb, 0.0);
          for (const auto& l : p.loadings) row.coeffs[l.var] -= p.slope * u[l.param] * l.coeff;
          row.coeffs[n + k] = -1.0;
          row.rel = Relation::LessEqual;
          row.rhs = -p.slope * p.base - p.intercept;
          lp.rows.push_back(std::move(row));
        }
      }
    }
    for (int j = inst.feasible.n_cont; j < n; ++j) model.binaries.push_back(j);

    rep = solve_milp(model);
    total_nodes += rep.node_count;
    if (rep.status == SolveStatus::Infeasible)
      throw std::runtime_error("scenario-expanded model is infeasible");

    std::vector<double> x(rep.x.begin(), rep.x.begin() + n);
    bool violated = false;
    for (int k = 0; k < nb; ++k) {
      double t_k = rep.x[n + k];
      int best_s = -1;
      double best_v = t_k + 1e-9 * (1.0 + std::fabs(t_k));
      for (std::size_t s = 0; s < offsets[k].size(); ++s) {
        if (std::find(active[k].begin(), active[k].end(), static_cast<int>(s)) !=
            active[k].end())
          continue;
        double v = block_max(k, static_cast<int>(s), x);
        if (v > best_v) {
          best_v = v;
          best_s = static_cast<int>(s);
        }
      }
      if (best_s >= 0) {
        active[k].push_back(best_s);
        violated = true;
      }
    }
    if (!violated) {
      out.x = std::move(x);
      break;
    }
  }
  if (out.x.empty()) throw std::runtime_error("scenario activation failed to converge");

  rep.node_count = total_nodes;
  out.solve = rep;
  out.lower = rep.value;
  UncertaintySpec eff = spec;
  eff.radius = delta;
  auto [upper, wit] = worst_case_value(inst, out.x, eff);
  out.upper = upper;
  out.witness = std::move(wit);
  return out;
}

double error_pct(double q_tilde, double q_delta) {
  if (q_delta == 0.0) throw std::invalid_argument("robust value is zero");
  return 100.0 * std::fabs(q_tilde - q_delta) / std::fabs(q_delta);
}

nlohmann::json to_json(const RobustReport& rep) {
  nlohmann::json j;
  j["mode"] = robust_mode_name(rep.mode);
  j["lower"] = rep.lower;
  j["upper"] = rep.upper;
  j["bracketed"] = rep.bracketed();
  j["x"] = rep.x;
  j["witness"] = rep.witness;
  if (rep.mode == RobustMode::SampledBracket) {
    j["sample_count"] = rep.sample_count;
    j["seed"] = rep.seed;
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "[%.3f %.3f]", rep.lower, rep.upper);
  j["display"] = {{"bracket", buf}};
  return j;
}

}  // namespace robustsense
