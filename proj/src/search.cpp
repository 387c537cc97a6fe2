#include "robustsense/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace robustsense {

void validate(const SearchInstance& si) {
  const int s = si.size();
  if (s == 0) throw std::invalid_argument("search instance has no cells");
  if (static_cast<int>(si.sweep.size()) != s || static_cast<int>(si.perturbable.size()) != s)
    throw std::invalid_argument("search instance field lengths disagree");
  for (int k = 0; k < s; ++k) {
    if (!(si.priors[k] > 0.0))
      throw std::invalid_argument("prior of cell " + std::to_string(k) + " must be positive");
    if (!(si.sweep[k] > 0.0))
      throw std::invalid_argument("sweep width of cell " + std::to_string(k) +
                                  " must be positive");
  }
  if (!(si.speed > 0.0) || !(si.cell_area > 0.0))
    throw std::invalid_argument("speed and cell area must be positive");
  if (si.budget < 0.0) throw std::invalid_argument("budget must be nonnegative");
  if (si.cap < 1 || si.cap > s) throw std::invalid_argument("cap must be in [1, cells]");
  if (si.radius < 0.0) throw std::invalid_argument("radius must be nonnegative");
}

InnerAllocation inner_allocation(const std::vector<int>& selected, const SearchInstance& si,
                                 const std::vector<double>& u) {
  if (selected.empty()) throw std::invalid_argument("empty selection");
  if (static_cast<int>(u.size()) != si.size())
    throw std::invalid_argument("parameter vector length does not match cell count");
  const int m = static_cast<int>(selected.size());
  std::vector<double> c(m), logbc(m);
  for (int i = 0; i < m; ++i) {
    const int k = selected[i];
    if (!(u[k] > 0.0))
      throw std::invalid_argument("nonpositive sweep width on selected cell " +
                                  std::to_string(k));
    c[i] = si.rate(u[k]);
    logbc[i] = std::log(si.priors[k] * c[i]);
  }

  InnerAllocation out;
  out.z.assign(si.size(), 0.0);

  // bisection on mu = log(lambda); bracket is the log image of
  // [min beta c e^{-c tau}, max beta c]
  double lo = logbc[0] - c[0] * si.budget;
  double hi = logbc[0];
  for (int i = 1; i < m; ++i) {
    lo = std::min(lo, logbc[i] - c[i] * si.budget);
    hi = std::max(hi, logbc[i]);
  }
  auto spent = [&](double mu) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += std::max(0.0, (logbc[i] - mu) / c[i]);
    return total;
  };
  if (si.budget > 0.0) {
    for (int it = 0; it < 200; ++it) {
      if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(hi))) break;
      double mid = 0.5 * (lo + hi);
      if (spent(mid) > si.budget)
        lo = mid;
      else
        hi = mid;
    }
  }
  const double mu = si.budget > 0.0 ? 0.5 * (lo + hi) : hi;
  out.multiplier = std::exp(mu);
  for (int i = 0; i < m; ++i) out.z[selected[i]] = std::max(0.0, (logbc[i] - mu) / c[i]);

  double value = 0.0;
  std::vector<bool> in(si.size(), false);
  for (int k : selected) in[k] = true;
  for (int k = 0; k < si.size(); ++k) {
    if (in[k])
      value += si.priors[k] * std::exp(-si.rate(u[k]) * out.z[k]);
    else
      value += si.priors[k];
  }
  out.value = value;
  return out;
}

namespace {

// j dominates l when it has at least the prior and the effective sweep of l,
// one of them strictly; selecting l but not j is then never necessary
std::vector<std::uint32_t> dominator_masks(const SearchInstance& si,
                                           const std::vector<double>& u) {
  const int s = si.size();
  std::vector<std::uint32_t> dom(s, 0);
  for (int l = 0; l < s; ++l)
    for (int j = 0; j < s; ++j) {
      if (j == l) continue;
      if (si.priors[j] >= si.priors[l] && u[j] >= u[l] &&
          (si.priors[j] > si.priors[l] || u[j] > u[l]))
        dom[l] |= (1u << j);
    }
  return dom;
}

}  // namespace

SolveReport solve_search(const SearchInstance& si, const std::vector<double>& u,
                         const SearchSolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  validate(si);
  if (static_cast<int>(u.size()) != si.size())
    throw std::invalid_argument("parameter vector length does not match cell count");
  const int s = si.size();
  if (s > 31) throw std::invalid_argument("subset enumeration supports at most 31 cells");
  // a larger selection never hurts: allocate zero hours to the extras
  const int pick = std::min(si.cap, s);

  std::vector<std::uint32_t> dom;
  if (opts.prune) dom = dominator_masks(si, u);

  SolveReport rep;
  long evaluated = 0;
  bool have = false;
  double best_val = 0.0;
  InnerAllocation best_alloc;
  std::vector<int> best_sel;

  std::vector<int> comb(pick);
  for (int i = 0; i < pick; ++i) comb[i] = i;
  std::vector<int> sel(pick);
  while (true) {
    bool closed = true;
    if (opts.prune) {
      std::uint32_t mask = 0;
      for (int i = 0; i < pick; ++i) mask |= (1u << comb[i]);
      for (int i = 0; i < pick && closed; ++i)
        if (dom[comb[i]] & ~mask) closed = false;
    }
    if (closed) {
      for (int i = 0; i < pick; ++i) sel[i] = comb[i];
      InnerAllocation alloc = inner_allocation(sel, si, u);
      ++evaluated;
      if (!have || alloc.value < best_val) {
        have = true;
        best_val = alloc.value;
        best_alloc = alloc;
        best_sel = sel;
      }
    }
    // next lexicographic combination
    int i = pick - 1;
    while (i >= 0 && comb[i] == s - pick + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < pick; ++j) comb[j] = comb[j - 1] + 1;
  }

  rep.status = SolveStatus::Optimal;
  rep.value = best_val;
  rep.bound = best_val;
  rep.node_count = evaluated;
  rep.x.assign(2 * s, 0.0);
  for (int k = 0; k < s; ++k) rep.x[k] = best_alloc.z[k];
  for (int k : best_sel) rep.x[s + k] = 1.0;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ProblemInstance to_problem_instance(const SearchInstance& si) {
  validate(si);
  const int s = si.size();
  ProblemInstance inst;
  inst.feasible.n_cont = s;  // z first, then y
  inst.feasible.n_bin = s;
  inst.feasible.bounds.resize(2 * s);
  for (int k = 0; k < s; ++k) {
    inst.feasible.bounds[k] = VarBounds{0.0, si.budget};
    inst.feasible.bounds[s + k] = VarBounds{0.0, 1.0};
  }
  LinearConstraint time;
  time.coeffs.assign(2 * s, 0.0);
  for (int k = 0; k < s; ++k) time.coeffs[k] = 1.0;
  time.rel = Relation::LessEqual;
  time.rhs = si.budget;
  inst.feasible.constraints.push_back(std::move(time));
  LinearConstraint card;
  card.coeffs.assign(2 * s, 0.0);
  for (int k = 0; k < s; ++k) card.coeffs[s + k] = 1.0;
  card.rel = Relation::LessEqual;
  card.rhs = si.cap;
  inst.feasible.constraints.push_back(std::move(card));
  for (int k = 0; k < s; ++k) {
    LinearConstraint link;  // z_k <= tau * y_k
    link.coeffs.assign(2 * s, 0.0);
    link.coeffs[k] = 1.0;
    link.coeffs[s + k] = -si.budget;
    link.rel = Relation::LessEqual;
    link.rhs = 0.0;
    inst.feasible.constraints.push_back(std::move(link));
  }

  inst.f0.assign(2 * s, 0.0);
  inst.blocks.reserve(s);
  for (int k = 0; k < s; ++k) {
    MaxBlock blk;
    NegExpDetection term;
    term.weight = si.priors[k];
    term.rate_scale = si.speed / si.cell_area;
    term.var = k;
    blk.terms.emplace_back(term);
    blk.nominal = {si.sweep[k]};
    blk.norm = NormKind::Abs;
    blk.perturbable = si.perturbable[k] != 0;
    inst.blocks.push_back(std::move(blk));
  }
  return inst;
}

SearchInstance search_from_problem(const ProblemInstance& inst) {
  const int s = static_cast<int>(inst.blocks.size());
  const auto bad = [](const std::string& what) {
    throw std::invalid_argument("not a search-form instance: " + what);
  };
  if (s == 0) bad("no blocks");
  if (inst.feasible.n_cont != s || inst.feasible.n_bin != s)
    bad("expected one continuous and one binary variable per block");
  for (double c : inst.f0)
    if (c != 0.0) bad("nonzero f0");

  SearchInstance si;
  si.priors.resize(s);
  si.sweep.resize(s);
  si.perturbable.resize(s);
  double rate = 0.0;
  for (int k = 0; k < s; ++k) {
    const auto& blk = inst.blocks[k];
    if (blk.terms.size() != 1) bad("block " + std::to_string(k) + " has several terms");
    const auto* ne = std::get_if<NegExpDetection>(&blk.terms[0]);
    if (!ne) bad("block " + std::to_string(k) + " is not a detection term");
    if (ne->var != k) bad("block " + std::to_string(k) + " is not wired to variable k");
    if (k == 0)
      rate = ne->rate_scale;
    else if (std::fabs(ne->rate_scale - rate) > 1e-12 * std::fabs(rate))
      bad("cells disagree on the rate scale");
    si.priors[k] = ne->weight;
    si.sweep[k] = blk.nominal[0];
    si.perturbable[k] = blk.perturbable ? 1 : 0;
  }
  // only the speed/area ratio matters to the model
  si.speed = rate;
  si.cell_area = 1.0;

  const auto& cons = inst.feasible.constraints;
  if (static_cast<int>(cons.size()) != 2 + s) bad("unexpected constraint count");
  si.budget = cons[0].rhs;
  si.cap = static_cast<int>(std::lround(cons[1].rhs));
  for (int k = 0; k < s; ++k) {
    if (cons[0].coeffs[k] != 1.0 || cons[0].coeffs[s + k] != 0.0) bad("time budget row");
    if (cons[1].coeffs[k] != 0.0 || cons[1].coeffs[s + k] != 1.0) bad("cardinality row");
    const auto& link = cons[2 + k];
    if (link.coeffs[k] != 1.0 || std::fabs(link.coeffs[s + k] + si.budget) > 1e-9 ||
        link.rhs != 0.0)
      bad("link row of cell " + std::to_string(k));
  }
  validate(si);
  return si;
}

}  // namespace robustsense
