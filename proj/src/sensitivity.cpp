#include "robustsense/sensitivity.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace robustsense {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Common skeleton of the two modulus estimates: sum the per-term quantity
// over active terms of perturbable blocks, max over supplied minimizers.
template <typename Summand>
double modulus_estimate(const ProblemInstance& inst,
                        const std::vector<std::vector<double>>& minimizers, double tol,
                        Summand summand) {
  if (minimizers.empty()) throw std::invalid_argument("empty minimizer list");
  double best = 0.0;
  bool first = true;
  for (const auto& xbar : minimizers) {
    if (!is_feasible(inst, xbar, 1e-6))
      throw std::invalid_argument("supplied minimizer is infeasible");
    ActiveSets act = active_sets(inst, xbar, tol);
    double total = 0.0;
    for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
      const auto& blk = inst.blocks[k];
      if (!blk.perturbable) continue;
      for (int i : act.active[k]) {
        std::vector<double> g = term_grad_u(blk.terms[i], blk.nominal, xbar);
        total += summand(g, blk.norm);
      }
    }
    if (first || total > best) best = total;
    first = false;
  }
  return best;
}

}  // namespace

ActiveSets active_sets(const ProblemInstance& inst, const std::vector<double>& xbar, double tol) {
  if (tol < 0.0) throw std::invalid_argument("tie tolerance must be nonnegative");
  ActiveSets out;
  out.tol = tol;
  out.active.resize(inst.blocks.size());
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    std::vector<double> vals(blk.terms.size());
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blk.terms.size(); ++i) {
      vals[i] = term_value(blk.terms[i], blk.nominal, xbar);
      m = std::max(m, vals[i]);
    }
    const double cut = m - tol * (1.0 + std::fabs(m));
    for (std::size_t i = 0; i < blk.terms.size(); ++i)
      if (vals[i] >= cut) out.active[k].push_back(static_cast<int>(i));
  }
  return out;
}

double lip_radius_estimate(const ProblemInstance& inst,
                           const std::vector<std::vector<double>>& minimizers, double tol) {
  return modulus_estimate(inst, minimizers, tol,
                          [](const std::vector<double>& g, NormKind n) { return dual_norm(g, n); });
}

double lip_full_estimate(const ProblemInstance& inst,
                         const std::vector<std::vector<double>>& minimizers, double tol) {
  return modulus_estimate(inst, minimizers, tol, [](const std::vector<double>& g, NormKind n) {
    double two = norm_value(g, NormKind::L2);
    double dual = dual_norm(g, n);
    return std::sqrt(two * two + dual * dual);
  });
}

SensitivityReport sensitivity_report(const ProblemInstance& inst,
                                     const std::vector<std::vector<double>>& minimizers,
                                     double q0, double tol) {
  if (minimizers.empty()) throw std::invalid_argument("empty minimizer list");
  SensitivityReport rep;
  rep.minimizers = minimizers;
  rep.q0 = q0;
  // pick the minimizer attaining the radius estimate
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t m = 0; m < minimizers.size(); ++m) {
    double v = lip_radius_estimate(inst, {minimizers[m]}, tol);
    if (v > best) {
      best = v;
      arg = m;
    }
  }
  rep.xbar = minimizers[arg];
  rep.active = active_sets(inst, rep.xbar, tol);
  rep.lip_radius = best;
  rep.lip_full = lip_full_estimate(inst, {rep.xbar}, tol);
  rep.block_grad_norms.assign(inst.blocks.size(), 0.0);
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    const auto& blk = inst.blocks[k];
    if (!blk.perturbable) continue;
    for (int i : rep.active.active[k]) {
      std::vector<double> g = term_grad_u(blk.terms[i], blk.nominal, rep.xbar);
      rep.block_grad_norms[k] += dual_norm(g, blk.norm);
    }
  }
  return rep;
}

double predict_robust_value(double q0, double lip_radius, double delta) {
  if (delta < 0.0) throw std::invalid_argument("radius must be nonnegative");
  return q0 + delta * lip_radius;
}

CertificateCheck check_subgradient_certificate(const SubgradientCertificate& cert,
                                               const ProblemInstance& inst, double tol) {
  CertificateCheck out;
  auto fail = [&out](std::string msg) {
    out.valid = false;
    out.violations.push_back(std::move(msg));
  };

  int m_total = 0;
  for (const auto& blk : inst.blocks) m_total += blk.dim();
  if (static_cast<int>(cert.g.size()) != m_total)
    fail("assembled g has length " + std::to_string(cert.g.size()) + ", expected " +
         std::to_string(m_total));
  if (cert.xbar.size() != static_cast<std::size_t>(inst.feasible.n_vars()))
    fail("xbar length does not match the instance");

  // per-block multiplier sums and entry checks
  std::vector<double> ysum(inst.blocks.size(), 0.0);
  std::vector<bool> touched(inst.blocks.size(), false);
  for (std::size_t e = 0; e < cert.entries.size(); ++e) {
    const auto& en = cert.entries[e];
    if (en.block < 0 || en.block >= static_cast<int>(inst.blocks.size())) {
      fail("entry " + std::to_string(e) + " references block " + std::to_string(en.block));
      continue;
    }
    const auto& blk = inst.blocks[en.block];
    if (en.term < 0 || en.term >= static_cast<int>(blk.terms.size())) {
      fail("entry " + std::to_string(e) + " references term " + std::to_string(en.term));
      continue;
    }
    if (en.y < -tol)
      fail("entry " + std::to_string(e) + " has negative multiplier " + std::to_string(en.y));
    if (static_cast<int>(en.w.size()) != blk.dim()) {
      fail("entry " + std::to_string(e) + " direction has wrong dimension");
      continue;
    }
    double wn = norm_value(en.w, blk.norm);
    if (wn > 1.0 + tol)
      fail("entry " + std::to_string(e) + " direction norm " + std::to_string(wn) + " exceeds 1");
    ysum[en.block] += en.y;
    touched[en.block] = true;
  }
  for (std::size_t k = 0; k < inst.blocks.size(); ++k) {
    if (!touched[k]) {
      fail("block " + std::to_string(k) + " has no multipliers");
      continue;
    }
    if (std::fabs(ysum[k] - 1.0) > tol * (1.0 + std::fabs(ysum[k])))
      fail("simplex violation in block " + std::to_string(k) + ": multipliers sum to " +
           std::to_string(ysum[k]));
  }
  if (!out.valid) return out;

  // assembly equations
  std::vector<double> g(m_total, 0.0);
  double gamma = 0.0;
  std::vector<int> offset(inst.blocks.size(), 0);
  for (std::size_t k = 1; k < inst.blocks.size(); ++k)
    offset[k] = offset[k - 1] + inst.blocks[k - 1].dim();
  for (const auto& en : cert.entries) {
    const auto& blk = inst.blocks[en.block];
    std::vector<double> grad = term_grad_u(blk.terms[en.term], blk.nominal, cert.xbar);
    double ip = 0.0;
    for (int t = 0; t < blk.dim(); ++t) {
      g[offset[en.block] + t] += en.y * grad[t];
      ip += grad[t] * en.w[t];
    }
    gamma += en.y * ip;
  }
  for (int t = 0; t < m_total; ++t) {
    if (std::fabs(g[t] - cert.g[t]) > tol * (1.0 + std::fabs(g[t]))) {
      fail("assembled g mismatch at coordinate " + std::to_string(t));
      break;
    }
  }
  if (std::fabs(gamma - cert.gamma) > tol * (1.0 + std::fabs(gamma)))
    fail("assembled gamma mismatch: " + std::to_string(gamma) + " vs " +
         std::to_string(cert.gamma));
  return out;
}

nlohmann::json to_json(const SensitivityReport& rep) {
  nlohmann::json j;
  j["xbar"] = rep.xbar;
  j["minimizers"] = rep.minimizers;
  j["q0"] = rep.q0;
  j["lip_radius"] = rep.lip_radius;
  j["lip_full"] = rep.lip_full;
  j["tie_tol"] = rep.active.tol;
  nlohmann::json act = nlohmann::json::array();
  for (const auto& a : rep.active.active) act.push_back(a);
  j["active_sets"] = act;
  j["block_grad_norms"] = rep.block_grad_norms;
  j["display"] = {
      {"q0", fixed(rep.q0, 3)},
      {"lip_radius", fixed(rep.lip_radius, 5)},
      {"lip_full", fixed(rep.lip_full, 5)},
  };
  return j;
}

}  // namespace robustsense
