#include "robustsense/instances.hpp"

#include <stdexcept>

#include "robustsense/rng.hpp"

namespace robustsense {

SearchCase search_case_from_name(const std::string& name) {
  if (name == "A" || name == "a") return SearchCase::A;
  if (name == "B" || name == "b") return SearchCase::B;
  if (name == "C" || name == "c") return SearchCase::C;
  throw std::invalid_argument("unknown search case '" + name + "'");
}

const char* search_case_name(SearchCase c) {
  switch (c) {
    case SearchCase::A: return "A";
    case SearchCase::B: return "B";
    case SearchCase::C: return "C";
  }
  return "?";
}

SearchInstance build_search_instance(SearchCase c, int kappa, double delta) {
  SearchInstance si;
  const int s = 20;
  si.priors.resize(s);
  for (int k = 0; k < s; ++k) si.priors[k] = 0.02 * (k / 5 + 1);
  si.sweep.assign(s, 20.0);
  si.perturbable.assign(s, 0);
  for (int k = 0; k < s; ++k) {
    switch (c) {
      case SearchCase::A: si.perturbable[k] = 1; break;
      case SearchCase::B: si.perturbable[k] = (k >= 6 && k <= 12) ? 1 : 0; break;
      case SearchCase::C: si.perturbable[k] = (k >= 13 && k <= 19) ? 1 : 0; break;
    }
  }
  si.speed = 200.0;
  si.cell_area = 3600.0;
  si.budget = 20.0;
  si.cap = kappa;
  si.radius = delta;
  validate(si);
  return si;
}

TechInvestConfig::BoundsVariant bounds_variant_from_name(const std::string& name) {
  if (name == "base") return TechInvestConfig::BoundsVariant::Base;
  if (name == "low-upper" || name == "low_upper") return TechInvestConfig::BoundsVariant::LowUpper;
  if (name == "high-lower" || name == "high_lower")
    return TechInvestConfig::BoundsVariant::HighLower;
  throw std::invalid_argument("unknown bounds variant '" + name + "'");
}

ProblemInstance build_tech_instance(const TechInvestConfig& cfg) {
  const int T = cfg.technologies;
  const int N = cfg.scenarios;
  if (T < 1 || N < 1) throw std::invalid_argument("technologies and scenarios must be positive");
  double b_lo = 2.0, b_hi = 20.0;
  switch (cfg.bounds) {
    case TechInvestConfig::BoundsVariant::Base: break;
    case TechInvestConfig::BoundsVariant::LowUpper: b_hi = 12.0; break;
    case TechInvestConfig::BoundsVariant::HighLower: b_lo = 6.0; break;
  }

  ProblemInstance inst;
  inst.feasible.n_cont = T;  // z first, then y
  inst.feasible.n_bin = T;
  inst.feasible.bounds.resize(2 * T);
  for (int t = 0; t < T; ++t) {
    inst.feasible.bounds[t] = VarBounds{0.0, b_hi};
    inst.feasible.bounds[T + t] = VarBounds{0.0, 1.0};
  }
  for (int t = 0; t < T; ++t) {
    LinearConstraint up;  // z_t <= bhi * y_t
    up.coeffs.assign(2 * T, 0.0);
    up.coeffs[t] = 1.0;
    up.coeffs[T + t] = -b_hi;
    up.rel = Relation::LessEqual;
    up.rhs = 0.0;
    inst.feasible.constraints.push_back(std::move(up));
    LinearConstraint down;  // blo * y_t <= z_t
    down.coeffs.assign(2 * T, 0.0);
    down.coeffs[t] = -1.0;
    down.coeffs[T + t] = b_lo;
    down.rel = Relation::LessEqual;
    down.rhs = 0.0;
    inst.feasible.constraints.push_back(std::move(down));
  }

  inst.f0.assign(2 * T, 0.0);
  for (int t = 0; t < T; ++t) inst.f0[t] = 1.0;

  // five penalty pieces alpha*gap + beta, gap = 100 - sum_t u_t z_t,
  // weighted 1/N through the slopes and intercepts
  const double alphas[5] = {cfg.alpha1, 4.0, 40.0, 400.0, 0.0};
  const double betas[5] = {0.0, -20.0, -380.0, -7580.0, 0.0};

  Rng rng(cfg.seed);
  inst.blocks.reserve(3 * N);
  for (int a = 0; a < 3; ++a) {
    for (int nsc = 0; nsc < N; ++nsc) {
      MaxBlock blk;
      blk.norm = NormKind::L2;
      blk.perturbable = true;
      blk.nominal.resize(T);
      for (int t = 0; t < T; ++t) blk.nominal[t] = rng.uniform(cfg.coeff_lo, cfg.coeff_hi);
      for (int i = 0; i < 5; ++i) {
        BilinearAffinePiece p;
        p.slope = alphas[i] / N;
        p.intercept = betas[i] / N;
        p.base = 100.0;
        p.loadings.reserve(T);
        for (int t = 0; t < T; ++t) p.loadings.push_back(Loading{t, t, 1.0});
        blk.terms.emplace_back(std::move(p));
      }
      inst.blocks.push_back(std::move(blk));
    }
  }
  validate(inst);
  return inst;
}

}  // namespace robustsense
