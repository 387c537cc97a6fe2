#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "robustsense/core.hpp"

namespace robustsense {

// Relative tie tolerance for active-set detection. Solver outputs carry
// ~1e-8 noise; 1e-6 captures true ties without merging distinct pieces.
inline constexpr double kDefaultTieTol = 1e-6;

struct ActiveSets {
  std::vector<std::vector<int>> active;  // per block, 0-based term indices
  double tol = kDefaultTieTol;
};

/// I_k(x) = { i : f_ik >= max_j f_jk - tol*(1 + |max|) } per block.
ActiveSets active_sets(const ProblemInstance& inst, const std::vector<double>& xbar, double tol);

struct SensitivityReport {
  std::vector<double> xbar;                      // minimizer attaining the estimates
  std::vector<std::vector<double>> minimizers;   // the set M handled
  ActiveSets active;                             // at xbar
  double lip_radius = 0.0;                       // radius-only modulus bound
  double lip_full = 0.0;                         // joint (u, delta) modulus bound
  double q0 = 0.0;
  std::vector<double> block_grad_norms;          // per block, sum of active dual norms
};

/// max over minimizers of sum_k sum_{i in I_k} ||grad_u f_ik||_* (perturbable
/// blocks only). For all-L2 blocks this is the sum of Euclidean norms.
double lip_radius_estimate(const ProblemInstance& inst,
                           const std::vector<std::vector<double>>& minimizers,
                           double tol = kDefaultTieTol);

/// Same with summand sqrt(||g||_2^2 + ||g||_*^2); the inner max over the unit
/// ball is attained at the dual-norm maximizer.
double lip_full_estimate(const ProblemInstance& inst,
                         const std::vector<std::vector<double>>& minimizers,
                         double tol = kDefaultTieTol);

SensitivityReport sensitivity_report(const ProblemInstance& inst,
                                     const std::vector<std::vector<double>>& minimizers,
                                     double q0, double tol = kDefaultTieTol);

/// First-order prediction of the robust value at radius delta >= 0.
double predict_robust_value(double q0, double lip_radius, double delta);

struct SubgradientCertificate {
  struct Entry {
    int block = 0;
    int term = 0;
    double y = 0.0;               // multiplier, >= 0
    std::vector<double> w;        // direction, ||w||_(k) <= 1
  };
  std::vector<double> xbar;
  std::vector<Entry> entries;
  std::vector<double> g;          // assembled, length sum of block dims
  double gamma = 0.0;
};

struct CertificateCheck {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Verifies the simplex condition on y per block, the norm bound on w, and
/// the assembly equations for (g, gamma); collects all violations.
CertificateCheck check_subgradient_certificate(const SubgradientCertificate& cert,
                                               const ProblemInstance& inst,
                                               double tol = 1e-9);

/// Full-precision values plus display strings in 3-/5-decimal table format.
nlohmann::json to_json(const SensitivityReport& rep);

}  // namespace robustsense
